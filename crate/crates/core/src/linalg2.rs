//! Closed-form 2×2 symmetric positive-definite algebra.
//!
//! Everything here is exact up to floating-point rounding: inverses use the
//! adjugate, eigenpairs come from the rotation angle `½·atan2(2·a12, a11 − a22)`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Determinants below `DEGENERACY_TOL · a11 · a22` are rejected.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at polar angle `phi`.
    pub fn from_angle(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self { x: c, y: s }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Option<Point2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    /// Polar angle in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        let a = self.y.atan2(self.x);
        if a < 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        }
    }

    pub fn dist_sq(self, other: Point2) -> f64 {
        (self - other).norm_sq()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Symmetric positive-definite 2×2 matrix `[[a11, a12], [a12, a22]]`.
///
/// Used both for a Fisher information `I(θ₀)` and for its inverse, the score
/// covariance `Σ`. Serialized as the nested array `[[a11,a12],[a12,a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 2]; 2]", into = "[[f64; 2]; 2]")]
pub struct SymPD2 {
    a11: f64,
    a12: f64,
    a22: f64,
}

impl SymPD2 {
    pub fn new(a11: f64, a12: f64, a22: f64) -> Result<Self> {
        let bad = Error::NotPositiveDefinite { a11, a12, a22 };
        if !(a11.is_finite() && a12.is_finite() && a22.is_finite()) {
            return Err(bad);
        }
        if a11 <= 0.0 || a22 <= 0.0 {
            return Err(bad);
        }
        let det = a11 * a22 - a12 * a12;
        if det < DEGENERACY_TOL * a11 * a22 {
            return Err(bad);
        }
        Ok(Self { a11, a12, a22 })
    }

    /// Parses a row-major matrix, rejecting asymmetric input.
    pub fn from_rows(rows: [[f64; 2]; 2]) -> Result<Self> {
        let [[a11, a12], [a21, a22]] = rows;
        if a12 != a21 {
            return Err(Error::Asymmetric { a12, a21 });
        }
        Self::new(a11, a12, a22)
    }

    pub fn identity() -> Self {
        Self {
            a11: 1.0,
            a12: 0.0,
            a22: 1.0,
        }
    }

    /// Unit-diagonal matrix `[[1, r], [r, 1]]`.
    pub fn unit_correlation(r: f64) -> Result<Self> {
        if !(r > -1.0 && r < 1.0) {
            return Err(Error::CorrelationOutOfRange(r));
        }
        Self::new(1.0, r, 1.0)
    }

    pub fn a11(&self) -> f64 {
        self.a11
    }
    pub fn a12(&self) -> f64 {
        self.a12
    }
    pub fn a22(&self) -> f64 {
        self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.a11, self.a12], [self.a12, self.a22]]
    }

    /// Normalized off-diagonal entry `a12 / √(a11·a22)`.
    pub fn correlation(&self) -> f64 {
        self.a12 / (self.a11 * self.a22).sqrt()
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        Point2::new(
            self.a11 * p.x + self.a12 * p.y,
            self.a12 * p.x + self.a22 * p.y,
        )
    }

    /// The quadratic form `pᵀ·M·p`.
    pub fn quad_form(&self, p: Point2) -> f64 {
        p.dot(self.apply(p))
    }

    /// Bilinear form `pᵀ·M·q`.
    pub fn inner(&self, p: Point2, q: Point2) -> f64 {
        p.dot(self.apply(q))
    }
}

impl TryFrom<[[f64; 2]; 2]> for SymPD2 {
    type Error = Error;
    fn try_from(rows: [[f64; 2]; 2]) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<SymPD2> for [[f64; 2]; 2] {
    fn from(m: SymPD2) -> Self {
        m.rows()
    }
}

pub fn invert_spd2(m: &SymPD2) -> Result<SymPD2> {
    let det = m.det();
    SymPD2::new(m.a22 / det, -m.a12 / det, m.a11 / det)
}

/// Correlation of the covariance `Σ = i⁻¹` implied by an information matrix.
///
/// Inverting a 2×2 matrix flips the sign of the off-diagonal and leaves the
/// normalisation untouched, so this is `−i12/√(i11·i22)`.
pub fn correlation_from_information(i: &SymPD2) -> f64 {
    -i.correlation()
}

/// Eigen-decomposition `M = P·Λ·Pᵀ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomp2 {
    /// Eigenvalues, descending.
    pub eigvals: [f64; 2],
    /// Columns of `P`, i.e. unit eigenvectors matching `eigvals`.
    pub eigvecs: [Point2; 2],
}

impl SpectralDecomp2 {
    pub fn reconstruct(&self) -> [[f64; 2]; 2] {
        let [l1, l2] = self.eigvals;
        let [v1, v2] = self.eigvecs;
        [
            [
                l1 * v1.x * v1.x + l2 * v2.x * v2.x,
                l1 * v1.x * v1.y + l2 * v2.x * v2.y,
            ],
            [
                l1 * v1.y * v1.x + l2 * v2.y * v2.x,
                l1 * v1.y * v1.y + l2 * v2.y * v2.y,
            ],
        ]
    }

    /// `P` as a linear map (eigenvectors in the columns).
    pub fn p(&self) -> LinearMap2 {
        let [v1, v2] = self.eigvecs;
        LinearMap2::new(v1.x, v2.x, v1.y, v2.y)
    }
}

fn canonical_sign(v: Point2) -> Point2 {
    let lead = if v.x != 0.0 { v.x } else { v.y };
    if lead < 0.0 {
        -v
    } else {
        v
    }
}

pub fn spectral_decomp(m: &SymPD2) -> SpectralDecomp2 {
    let half_tr = 0.5 * (m.a11 + m.a22);
    let half_diff = 0.5 * (m.a11 - m.a22);
    let radius = half_diff.hypot(m.a12);
    let l1 = half_tr + radius;
    // det / l1 avoids cancellation in half_tr − radius.
    let l2 = m.det() / l1;

    let theta = 0.5 * (2.0 * m.a12).atan2(m.a11 - m.a22);
    let (s, c) = theta.sin_cos();
    let v1 = canonical_sign(Point2::new(c, s));
    let v2 = canonical_sign(Point2::new(-s, c));
    SpectralDecomp2 {
        eigvals: [l1, l2],
        eigvecs: [v1, v2],
    }
}

/// A general 2×2 matrix acting on column vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearMap2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl LinearMap2 {
    pub const IDENTITY: LinearMap2 = LinearMap2 {
        m11: 1.0,
        m12: 0.0,
        m21: 0.0,
        m22: 1.0,
    };

    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        Point2::new(
            self.m11 * p.x + self.m12 * p.y,
            self.m21 * p.x + self.m22 * p.y,
        )
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m11, self.m21, self.m12, self.m22)
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        (d != 0.0 && d.is_finite())
            .then(|| Self::new(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d))
    }

    /// `self · rhs`.
    pub fn compose(&self, rhs: &LinearMap2) -> Self {
        Self::new(
            self.m11 * rhs.m11 + self.m12 * rhs.m21,
            self.m11 * rhs.m12 + self.m12 * rhs.m22,
            self.m21 * rhs.m11 + self.m22 * rhs.m21,
            self.m21 * rhs.m12 + self.m22 * rhs.m22,
        )
    }

    /// `M·S·Mᵀ` as a plain row-major array (the result need not be PD when
    /// `M` is singular, so no validation happens here).
    pub fn sandwich(&self, s: &SymPD2) -> [[f64; 2]; 2] {
        let ms = self.compose(&LinearMap2::new(s.a11, s.a12, s.a12, s.a22));
        let r = ms.compose(&self.transpose());
        [[r.m11, r.m12], [r.m21, r.m22]]
    }
}

/// The whitening map `Λ^{1/2}·Pᵀ` of an information matrix.
///
/// If `Z` has covariance `i⁻¹` then `M·Z` is isotropic, and
/// `‖M·(z − θ)‖² = (z − θ)ᵀ·i·(z − θ)`.
pub fn whitening_map(i: &SymPD2) -> LinearMap2 {
    let sd = spectral_decomp(i);
    let [l1, l2] = sd.eigvals;
    let [v1, v2] = sd.eigvecs;
    let (r1, r2) = (l1.sqrt(), l2.sqrt());
    LinearMap2::new(r1 * v1.x, r1 * v1.y, r2 * v2.x, r2 * v2.y)
}

/// Upper-triangular `L` with `Lᵀ·L = i`.
///
/// This is the whitening map composed with the rotation that sends the image
/// of the first basis vector onto the positive horizontal axis; the image of
/// the second basis vector then lies in the upper half-plane.
pub fn canonical_whitening(i: &SymPD2) -> LinearMap2 {
    let r11 = i.a11.sqrt();
    let r12 = i.a12 / r11;
    let r22 = (i.det() / i.a11).sqrt();
    LinearMap2::new(r11, r12, 0.0, r22)
}
