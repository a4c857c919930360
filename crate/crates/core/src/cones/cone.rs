use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg2::{LinearMap2, Point2, SymPD2};

const UNIT_TOL: f64 = 1e-12;

/// A closed convex cone in the plane.
///
/// Sectors and rays are stored by unit generators, half-planes by their
/// inward unit normal. With at most two boundary rays, every projection is a
/// choice among three closed-form candidates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cone2 {
    Origin,
    Ray {
        dir: Point2,
    },
    /// Conic hull of two generators; the opening angle is in `(0, π)`.
    Sector {
        a: Point2,
        b: Point2,
    },
    /// `{ z : z·normal ≥ 0 }`.
    HalfPlane {
        normal: Point2,
    },
    FullPlane,
}

fn unit(v: Point2, what: &'static str) -> Result<Point2> {
    v.normalized().ok_or(Error::InvalidCone(what))
}

impl Cone2 {
    pub fn ray(dir: Point2) -> Result<Self> {
        Ok(Cone2::Ray {
            dir: unit(dir, "ray direction must be nonzero")?,
        })
    }

    pub fn sector(a: Point2, b: Point2) -> Result<Self> {
        let a = unit(a, "sector generator must be nonzero")?;
        let b = unit(b, "sector generator must be nonzero")?;
        if a.cross(b).abs() <= UNIT_TOL {
            return Err(Error::InvalidCone("sector generators are collinear"));
        }
        Ok(Cone2::Sector { a, b })
    }

    pub fn half_plane(normal: Point2) -> Result<Self> {
        Ok(Cone2::HalfPlane {
            normal: unit(normal, "half-plane normal must be nonzero")?,
        })
    }

    /// The nonnegative quadrant `{θ₁ ≥ 0, θ₂ ≥ 0}`.
    pub fn quadrant() -> Self {
        Cone2::Sector {
            a: Point2::new(1.0, 0.0),
            b: Point2::new(0.0, 1.0),
        }
    }

    fn sector_coords(a: Point2, b: Point2, z: Point2) -> (f64, f64) {
        let d = a.cross(b);
        (z.cross(b) / d, a.cross(z) / d)
    }

    /// Euclidean projection.
    pub fn project(&self, z: Point2) -> Point2 {
        match *self {
            Cone2::Origin => Point2::ORIGIN,
            Cone2::FullPlane => z,
            Cone2::Ray { dir } => dir * z.dot(dir).max(0.0),
            Cone2::HalfPlane { normal } => {
                let d = z.dot(normal);
                if d >= 0.0 {
                    z
                } else {
                    z - normal * d
                }
            }
            Cone2::Sector { a, b } => {
                let (ca, cb) = Self::sector_coords(a, b, z);
                if ca >= 0.0 && cb >= 0.0 {
                    return z;
                }
                let pa = a * z.dot(a).max(0.0);
                let pb = b * z.dot(b).max(0.0);
                if z.dist_sq(pb) < z.dist_sq(pa) {
                    pb
                } else {
                    pa
                }
            }
        }
    }

    /// Projection in the metric `‖v‖²_M = vᵀ·M·v`.
    pub fn project_metric(&self, z: Point2, m: &SymPD2) -> Point2 {
        let ray = |u: Point2| u * (m.inner(z, u) / m.quad_form(u)).max(0.0);
        match *self {
            Cone2::Origin => Point2::ORIGIN,
            Cone2::FullPlane => z,
            Cone2::Ray { dir } => ray(dir),
            Cone2::HalfPlane { normal } => {
                let d = z.dot(normal);
                if d >= 0.0 {
                    return z;
                }
                // Closest point on the line {w·n = 0} in the M-metric moves
                // along M⁻¹·n.
                let det = m.det();
                let minv_n = Point2::new(
                    (m.a22() * normal.x - m.a12() * normal.y) / det,
                    (m.a11() * normal.y - m.a12() * normal.x) / det,
                );
                z - minv_n * (d / normal.dot(minv_n))
            }
            Cone2::Sector { a, b } => {
                let (ca, cb) = Self::sector_coords(a, b, z);
                if ca >= 0.0 && cb >= 0.0 {
                    return z;
                }
                let pa = ray(a);
                let pb = ray(b);
                if m.quad_form(z - pb) < m.quad_form(z - pa) {
                    pb
                } else {
                    pa
                }
            }
        }
    }

    pub fn contains(&self, z: Point2) -> bool {
        self.project(z) == z
    }

    pub fn distance_sq(&self, z: Point2) -> f64 {
        z.dist_sq(self.project(z))
    }

    /// Whether `inner ⊆ self`, up to rounding in the generators.
    pub fn contains_cone(&self, inner: &Cone2) -> bool {
        let near = |u: Point2| self.distance_sq(u) <= UNIT_TOL * UNIT_TOL;
        match (*inner, *self) {
            (Cone2::Origin, _) => true,
            (_, Cone2::FullPlane) => true,
            (Cone2::Ray { dir }, _) => near(dir),
            (Cone2::Sector { a, b }, _) => near(a) && near(b),
            (Cone2::HalfPlane { normal }, Cone2::HalfPlane { normal: outer }) => {
                normal.dist_sq(outer) <= UNIT_TOL * UNIT_TOL
            }
            _ => false,
        }
    }

    /// Image under an invertible linear map.
    pub fn transform(&self, map: &LinearMap2) -> Result<Self> {
        let inv = map.inverse().ok_or(Error::InvalidCone("map is singular"))?;
        match *self {
            Cone2::Origin => Ok(Cone2::Origin),
            Cone2::FullPlane => Ok(Cone2::FullPlane),
            Cone2::Ray { dir } => Cone2::ray(map.apply(dir)),
            Cone2::Sector { a, b } => Cone2::sector(map.apply(a), map.apply(b)),
            Cone2::HalfPlane { normal } => Cone2::half_plane(inv.transpose().apply(normal)),
        }
    }
}

/// `‖z − Π₀(z)‖² − ‖z − Π₁(z)‖²` for Euclidean projections.
pub fn lrs_between(null: &Cone2, alt: &Cone2, z: Point2) -> f64 {
    null.distance_sq(z) - alt.distance_sq(z)
}

/// The same difference with both minimisations done in the quadratic form
/// `Q(θ | z) = (z − θ)ᵀ·I·(z − θ)`, without whitening.
pub fn lrs_quadratic(info: &SymPD2, null: &Cone2, alt: &Cone2, z: Point2) -> Result<f64> {
    if !alt.contains_cone(null) {
        return Err(Error::NotNested);
    }
    let q0 = info.quad_form(z - null.project_metric(z, info));
    let q1 = info.quad_form(z - alt.project_metric(z, info));
    Ok(q0 - q1)
}
