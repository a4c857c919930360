//! Whitened cone pairs for the two boundary-parameter configurations and
//! their region decompositions.
//!
//! Region angles are measured from the image of the first parameter axis,
//! turning towards the image of the second. In that frame, with
//! `γ = arcsin ρ`, the null ray of Case 8 points at `π/2 + γ` and the line
//! orthogonal to it at `γ`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::cone::{lrs_between, Cone2};
use crate::error::{Error, Result};
use crate::linalg2::{correlation_from_information, whitening_map, LinearMap2, Point2, SymPD2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseId {
    /// Two parameters of interest on the boundary.
    Case7,
    /// Interest plus nuisance parameter on the boundary, alternative cone
    /// equal to the image of the nonnegative quadrant.
    Case8Correct,
    /// Same null ray, alternative cone taken as the whole upper half-plane.
    Case8Selfliang,
}

impl CaseId {
    pub fn is_case8(self) -> bool {
        !matches!(self, CaseId::Case7)
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseId::Case7 => "case7",
            CaseId::Case8Correct => "case8_correct",
            CaseId::Case8Selfliang => "case8_selfliang",
        })
    }
}

/// Region of the plane. Case 7 uses `R1..R3` and `AltCone`; Case 8 uses
/// `R1..R6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    #[serde(rename = "1")]
    R1,
    #[serde(rename = "2")]
    R2,
    #[serde(rename = "3")]
    R3,
    #[serde(rename = "4")]
    R4,
    #[serde(rename = "5")]
    R5,
    #[serde(rename = "6")]
    R6,
    #[serde(rename = "C")]
    AltCone,
}

impl Region {
    pub const CASE8: [Region; 6] = [
        Region::R1,
        Region::R2,
        Region::R3,
        Region::R4,
        Region::R5,
        Region::R6,
    ];
    pub const CASE7: [Region; 4] = [Region::R1, Region::R2, Region::R3, Region::AltCone];
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::R1 => "1",
            Region::R2 => "2",
            Region::R3 => "3",
            Region::R4 => "4",
            Region::R5 => "5",
            Region::R6 => "6",
            Region::AltCone => "C",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub case_id: CaseId,
    pub region: Region,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Angles {
    /// `arcsin ρ`: opening of Region 1 in Case 8 (negative for ρ < 0).
    pub gamma: f64,
    /// Case 8: `π/2 − γ`. Case 7: opening of the alternative cone,
    /// `arccos(I₁₂/√(I₁₁I₂₂))`.
    pub alpha: f64,
    /// Angle between the images of the two parameter axes, measured from the
    /// geometry itself.
    pub axes_angle: f64,
    pub alt_cone_obtuse: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseGeometry {
    pub case_id: CaseId,
    pub rho: f64,
    pub null_cone: Cone2,
    pub alt_cone: Cone2,
    pub whitened: bool,
    /// Unit images of the two parameter axes.
    axes: [Point2; 2],
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > -1.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::CorrelationOutOfRange(rho))
    }
}

impl CaseGeometry {
    /// Whitened geometry in the canonical frame: first axis image along
    /// `(1, 0)`, second at `(−ρ, √(1−ρ²))`.
    pub fn new(case_id: CaseId, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        let e1 = Point2::new(1.0, 0.0);
        let v = Point2::new(-rho, (1.0 - rho * rho).sqrt());
        let quadrant = Cone2::Sector { a: e1, b: v };
        let (null_cone, alt_cone) = match case_id {
            CaseId::Case7 => (Cone2::Origin, quadrant),
            CaseId::Case8Correct => (Cone2::Ray { dir: v }, quadrant),
            CaseId::Case8Selfliang => (
                Cone2::Ray { dir: v },
                Cone2::HalfPlane {
                    normal: Point2::new(0.0, 1.0),
                },
            ),
        };
        Ok(Self {
            case_id,
            rho,
            null_cone,
            alt_cone,
            whitened: true,
            axes: [e1, v],
        })
    }

    /// Cones in the original parameter coordinates (θ relative to θ₀).
    pub fn original(case_id: CaseId, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        let e1 = Point2::new(1.0, 0.0);
        let e2 = Point2::new(0.0, 1.0);
        let (null_cone, alt_cone) = match case_id {
            CaseId::Case7 => (Cone2::Origin, Cone2::quadrant()),
            CaseId::Case8Correct => (Cone2::Ray { dir: e2 }, Cone2::quadrant()),
            CaseId::Case8Selfliang => (Cone2::Ray { dir: e2 }, Cone2::HalfPlane { normal: e2 }),
        };
        Ok(Self {
            case_id,
            rho,
            null_cone,
            alt_cone,
            whitened: false,
            axes: [e1, e2],
        })
    }

    /// Whitens the original-coordinate geometry with `Λ^{1/2}·Pᵀ` of `info`.
    /// The result lives in the eigenframe rather than the canonical one.
    pub fn from_information(case_id: CaseId, info: &SymPD2) -> Result<Self> {
        let rho = correlation_from_information(info);
        Self::original(case_id, rho)?.transformed(&whitening_map(info))
    }

    pub fn transformed(&self, map: &LinearMap2) -> Result<Self> {
        let unit = |p: Point2| p.normalized().ok_or(Error::InvalidCone("map is singular"));
        Ok(Self {
            case_id: self.case_id,
            rho: self.rho,
            null_cone: self.null_cone.transform(map)?,
            alt_cone: self.alt_cone.transform(map)?,
            whitened: true,
            axes: [
                unit(map.apply(self.axes[0]))?,
                unit(map.apply(self.axes[1]))?,
            ],
        })
    }

    pub fn axes(&self) -> [Point2; 2] {
        self.axes
    }

    pub fn gamma(&self) -> f64 {
        self.rho.asin()
    }

    /// Coordinates of `z` in the frame where the first axis image is `(1, 0)`
    /// and the second lies in the upper half-plane.
    pub fn local(&self, z: Point2) -> Point2 {
        let [e, v] = self.axes;
        let orient = if e.cross(v) >= 0.0 { 1.0 } else { -1.0 };
        Point2::new(z.dot(e), orient * e.cross(z))
    }

    pub fn angles(&self) -> Angles {
        let gamma = self.gamma();
        let [e, v] = self.axes;
        let axes_angle = e.dot(v).clamp(-1.0, 1.0).acos();
        let alpha = match self.case_id {
            CaseId::Case7 => (-self.rho).acos(),
            _ => FRAC_PI_2 - gamma,
        };
        Angles {
            gamma,
            alpha,
            axes_angle,
            alt_cone_obtuse: axes_angle > FRAC_PI_2,
        }
    }

    pub fn classify(&self, z: Point2) -> RegionLabel {
        let phi = self.local(z).angle();
        let region = match self.case_id {
            CaseId::Case7 => classify_case7(phi, (-self.rho).acos()),
            _ => classify_case8(phi, self.gamma()),
        };
        RegionLabel {
            case_id: self.case_id,
            region,
        }
    }

    /// `‖z̃ − Π(C̃₀, z̃)‖² − ‖z̃ − Π(C̃₁, z̃)‖²`.
    pub fn lrs_whitened(&self, z: Point2) -> Result<f64> {
        if !self.whitened {
            return Err(Error::Precondition(
                "geometry is in original coordinates; whiten it first".into(),
            ));
        }
        Ok(lrs_between(&self.null_cone, &self.alt_cone, z))
    }
}

// Boundaries belong to the lower region index; Case 7's cone region ranks last.
fn classify_case7(phi: f64, alpha: f64) -> Region {
    if phi == 0.0 || phi >= 1.5 * PI {
        Region::R1
    } else if phi >= alpha + FRAC_PI_2 {
        Region::R2
    } else if phi >= alpha {
        Region::R3
    } else {
        Region::AltCone
    }
}

fn classify_case8(phi: f64, gamma: f64) -> Region {
    let bounds = [
        gamma.max(0.0),
        FRAC_PI_2 + gamma,
        PI + gamma.min(0.0),
        PI + gamma.max(0.0),
        1.5 * PI,
        TAU,
    ];
    let idx = bounds.iter().position(|&b| phi <= b).unwrap_or(5);
    Region::CASE8[idx]
}

/// Quantities the per-region closed forms are written in.
#[derive(Debug, Clone, Copy)]
struct Frame {
    /// Local horizontal coordinate (along the first axis image).
    x: f64,
    /// Local vertical coordinate.
    y: f64,
    /// Component along `û`, orthogonal to the null ray.
    a: f64,
    /// Component along the null ray direction `v̂`.
    b: f64,
}

impl CaseGeometry {
    fn frame(&self, z: Point2) -> Frame {
        let l = self.local(z);
        let (s, c) = self.gamma().sin_cos();
        Frame {
            x: l.x,
            y: l.y,
            a: l.x * c + l.y * s,
            b: -l.x * s + l.y * c,
        }
    }
}

/// Closed-form statistic for a point known to lie in `label`'s region.
///
/// Case 7: the cone region gives `‖z̃‖²`, the two face regions a single
/// squared coordinate, Region 2 zero. Case 8 with the correct alternative:
/// Region 1 `‖z̃‖²`, Region 2 the squared distance to the null line, Regions
/// 3–5 zero, Region 6 `x² − max(b, 0)²` (which is `x²` whenever ρ ≥ 0).
/// The misidentified geometry is delegated to [`region_statistic_selfliang`].
pub fn region_statistic(geom: &CaseGeometry, z: Point2, label: RegionLabel) -> Result<f64> {
    if label.case_id != geom.case_id {
        return Err(Error::Precondition(format!(
            "label for {} used with {} geometry",
            label.case_id, geom.case_id
        )));
    }
    let f = geom.frame(z);
    let norm_sq = f.x * f.x + f.y * f.y;
    match geom.case_id {
        CaseId::Case7 => Ok(match label.region {
            Region::AltCone => norm_sq,
            Region::R1 => f.x * f.x,
            Region::R3 => f.b * f.b,
            Region::R2 => 0.0,
            r => {
                return Err(Error::Precondition(format!(
                    "region {r} does not exist in case 7"
                )))
            }
        }),
        CaseId::Case8Correct => Ok(match label.region {
            Region::R1 => norm_sq,
            Region::R2 => f.a * f.a,
            Region::R3 | Region::R4 | Region::R5 => 0.0,
            Region::R6 => f.x * f.x - f.b.max(0.0).powi(2),
            Region::AltCone => {
                return Err(Error::Precondition(
                    "case 8 has no cone region label".into(),
                ))
            }
        }),
        CaseId::Case8Selfliang => region_statistic_selfliang(geom, z, label),
    }
}

/// The region-by-region list for the misidentified geometry (ρ ≥ 0):
/// `Z̃₁² + Z̃₂²`, a single squared normal, `‖Y‖²`, `‖Y‖² − Z̃₁²`, `‖Y‖²`, `Z̃₂²`.
///
/// The list mixes coordinate frames. Each entry is read in the frame that
/// makes it a projection identity: in Region 3, `Y` is the component
/// orthogonal to the null ray; in Regions 4–5, `Y` is the horizontal
/// projection and `Z̃₁` the null-ray coordinate; in Region 6 the squared
/// coordinate is the horizontal one. [`selfliang_literal`] gives the
/// single-frame reading for comparison.
pub fn region_statistic_selfliang(
    geom: &CaseGeometry,
    z: Point2,
    label: RegionLabel,
) -> Result<f64> {
    if geom.case_id != CaseId::Case8Selfliang {
        return Err(Error::Precondition(
            "geometry is not case8_selfliang".into(),
        ));
    }
    if geom.rho < 0.0 {
        return Err(Error::Precondition(
            "the region list is only stated for nonnegative correlation".into(),
        ));
    }
    let f = geom.frame(z);
    Ok(match label.region {
        Region::R1 => f.x * f.x + f.y * f.y,
        Region::R2 => f.a * f.a,
        Region::R3 => f.a * f.a,
        Region::R4 => f.x * f.x - f.b * f.b,
        Region::R5 => f.x * f.x,
        Region::R6 => f.x * f.x,
        Region::AltCone => {
            return Err(Error::Precondition(
                "case 8 has no cone region label".into(),
            ))
        }
    })
}

/// The same list read in one frame: `Z̃ = (x, y)` the local whitened
/// coordinates and `Y = (x, 0)` the horizontal projection.
pub fn selfliang_literal(geom: &CaseGeometry, z: Point2, label: RegionLabel) -> Result<f64> {
    if geom.case_id != CaseId::Case8Selfliang {
        return Err(Error::Precondition(
            "geometry is not case8_selfliang".into(),
        ));
    }
    let f = geom.frame(z);
    Ok(match label.region {
        Region::R1 => f.x * f.x + f.y * f.y,
        Region::R2 => f.a * f.a,
        Region::R3 | Region::R5 => f.x * f.x,
        // ‖Y‖² − Z̃₁² with Y = (Z̃₁, 0).
        Region::R4 => 0.0,
        Region::R6 => f.y * f.y,
        Region::AltCone => {
            return Err(Error::Precondition(
                "case 8 has no cone region label".into(),
            ))
        }
    })
}

/// Per-region agreement of the closed-form list with the projection engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfLiangAudit {
    pub rho: f64,
    /// `(region, points, max |reconciled − engine|, max |literal − engine|)`.
    pub regions: Vec<(Region, usize, f64, f64)>,
}

/// Compares both readings of the region list against the projection engine
/// on the supplied points.
pub fn audit_selfliang(rho: f64, points: &[Point2]) -> Result<SelfLiangAudit> {
    let geom = CaseGeometry::new(CaseId::Case8Selfliang, rho)?;
    let mut acc: Vec<(Region, usize, f64, f64)> =
        Region::CASE8.iter().map(|&r| (r, 0, 0.0, 0.0)).collect();
    for &z in points {
        let label = geom.classify(z);
        let engine = geom.lrs_whitened(z)?;
        let reconciled = region_statistic_selfliang(&geom, z, label)?;
        let literal = selfliang_literal(&geom, z, label)?;
        let slot = acc
            .iter_mut()
            .find(|s| s.0 == label.region)
            .expect("case 8 region");
        slot.1 += 1;
        slot.2 = slot.2.max((reconciled - engine).abs());
        slot.3 = slot.3.max((literal - engine).abs());
    }
    Ok(SelfLiangAudit { rho, regions: acc })
}
