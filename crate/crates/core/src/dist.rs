//! Chi-squared building blocks, chi-bar-squared mixtures and the corrected
//! mixture used when the score correlation is negative.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, PolarNormal};
use crate::special::{gamma_p, gamma_q};

/// Tolerance on `w0 + w1 + w2 = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Default ratio between the repair-term support `ε` and the sign-change
/// root of the signed density.
pub const DEFAULT_EPSILON_MULTIPLIER: f64 = 1.01;

const BISECT_MAX_ITER: usize = 200;
const BRACKET_HI: f64 = 100.0;

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange(p))
    }
}

/// Chi-squared CDF with `k` degrees of freedom; `k = 0` is the point mass at 0.
pub fn chisq_cdf(k: u32, x: f64) -> f64 {
    match k {
        _ if x < 0.0 => 0.0,
        0 => 1.0,
        2 => -(-0.5 * x).exp_m1(),
        _ => chisq_cdf_gamma(k, x),
    }
}

/// The incomplete-gamma route for every `k ≥ 1`, without closed-form
/// shortcuts. Used to cross-check [`chisq_cdf`].
pub fn chisq_cdf_gamma(k: u32, x: f64) -> f64 {
    assert!(k > 0, "chi-squared(0) has no incomplete-gamma form");
    if x <= 0.0 {
        return 0.0;
    }
    gamma_p(0.5 * k as f64, 0.5 * x)
}

/// Upper tail `1 − F_k(x)`, computed directly.
pub fn chisq_sf(k: u32, x: f64) -> f64 {
    match k {
        _ if x < 0.0 => 1.0,
        0 => 0.0,
        2 => (-0.5 * x).exp(),
        _ => gamma_q(0.5 * k as f64, 0.5 * x),
    }
}

/// Chi-squared density for `k ≥ 1` at `x > 0`.
pub fn chisq_pdf(k: u32, x: f64) -> f64 {
    assert!(k > 0, "chi-squared(0) has no density");
    if x <= 0.0 {
        return 0.0;
    }
    match k {
        1 => (-0.5 * x).exp() / (2.0 * PI * x).sqrt(),
        2 => 0.5 * (-0.5 * x).exp(),
        _ => {
            let a = 0.5 * k as f64;
            ((a - 1.0) * x.ln() - 0.5 * x - a * 2f64.ln() - crate::special::ln_gamma(a)).exp()
        }
    }
}

/// Smallest `x` in `[lo, hi]` with `f(x) ≥ target`, for nondecreasing `f`
/// with `f(hi) ≥ target`.
fn bisect_up(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..BISECT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Grows `hi` until `f(hi) ≥ target`.
fn expand_bracket(f: &impl Fn(f64) -> f64, target: f64, mut hi: f64) -> f64 {
    while f(hi) < target && hi < 1e6 {
        hi *= 2.0;
    }
    hi
}

pub fn chisq_quantile(k: u32, p: f64) -> Result<f64> {
    check_probability(p)?;
    if k == 0 {
        return Ok(0.0);
    }
    let cdf = |x| chisq_cdf(k, x);
    let hi = expand_bracket(&cdf, p, BRACKET_HI);
    Ok(bisect_up(cdf, p, 0.0, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct RawWeights {
    w0: f64,
    w1: f64,
    w2: f64,
}

/// Mixture `w0·χ²₀ + w1·χ²₁ + w2·χ²₂`.
///
/// Weights may be negative so that the improper mixture obtained by naively
/// extending the positive-correlation formula can be inspected; such a
/// mixture is not [`proper`](ChiBarMixture::is_proper) and refuses to be
/// inverted or sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights", into = "RawWeights")]
pub struct ChiBarMixture {
    w0: f64,
    w1: f64,
    w2: f64,
}

impl TryFrom<RawWeights> for ChiBarMixture {
    type Error = Error;
    fn try_from(r: RawWeights) -> Result<Self> {
        ChiBarMixture::new(r.w0, r.w1, r.w2)
    }
}

impl From<ChiBarMixture> for RawWeights {
    fn from(m: ChiBarMixture) -> Self {
        RawWeights {
            w0: m.w0,
            w1: m.w1,
            w2: m.w2,
        }
    }
}

impl ChiBarMixture {
    pub fn new(w0: f64, w1: f64, w2: f64) -> Result<Self> {
        let finite = w0.is_finite() && w1.is_finite() && w2.is_finite();
        if !finite || (w0 + w1 + w2 - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightsDoNotSum { w0, w1, w2 });
        }
        Ok(Self { w0, w1, w2 })
    }

    /// The 50:50 mixture of a point mass at zero and χ²₁.
    pub fn fifty_fifty() -> Self {
        Self {
            w0: 0.5,
            w1: 0.5,
            w2: 0.0,
        }
    }

    pub fn weights(&self) -> [f64; 3] {
        [self.w0, self.w1, self.w2]
    }

    pub fn is_proper(&self) -> bool {
        self.w0 >= 0.0 && self.w1 >= 0.0 && self.w2 >= 0.0
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.w0 + self.w1 * chisq_cdf(1, x) + self.w2 * chisq_cdf(2, x)
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !self.is_proper() {
            return Err(Error::ImproperMixture("inverted"));
        }
        check_probability(p)?;
        if p <= self.w0 {
            return Ok(0.0);
        }
        let cdf = |x| self.cdf(x);
        let hi = expand_bracket(&cdf, p, BRACKET_HI);
        Ok(bisect_up(cdf, p, 0.0, hi))
    }

    /// `n` independent draws, reproducible from `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        if !self.is_proper() {
            return Err(Error::ImproperMixture("sampled"));
        }
        let mut rng = rng::stream(seed, 0);
        let mut normal = PolarNormal::new();
        let split0 = self.w0;
        let split1 = self.w0 + self.w1;
        let out = (0..n)
            .map(|_| {
                let u: f64 = rand::Rng::random(&mut rng);
                if u < split0 {
                    0.0
                } else if u < split1 {
                    let z = normal.sample(&mut rng);
                    z * z
                } else {
                    let (a, b) = PolarNormal::pair(&mut rng);
                    a * a + b * b
                }
            })
            .collect();
        Ok(out)
    }
}

/// `w1·f₁(x) + w2·f₂(x)`, the continuous part of a chi-bar mixture density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedDensityProbe {
    pub w1: f64,
    pub w2: f64,
}

impl SignedDensityProbe {
    pub fn new(w1: f64, w2: f64) -> Self {
        Self { w1, w2 }
    }

    /// `e^{−x/2}·(w1/√(2πx) + w2/2)`; may be negative.
    pub fn density(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x <= 0.0 {
            return Err(Error::DensityDomain(x));
        }
        Ok((-0.5 * x).exp() * (self.w1 / (2.0 * PI * x).sqrt() + 0.5 * self.w2))
    }
}

/// Where the signed density `w1·f₁ + w2·f₂` changes sign: `2·w1² / (π·w2²)`.
pub fn epsilon_root(w1: f64, w2: f64) -> Result<f64> {
    if w2.is_nan() || w2 >= 0.0 {
        return Err(Error::NoSignChange(w2));
    }
    if w1.is_nan() || w1 <= 0.0 {
        return Err(Error::Precondition(format!(
            "chi-squared(1) weight must be positive, got {w1}"
        )));
    }
    Ok(2.0 * w1 * w1 / (PI * w2 * w2))
}

/// `½·1(x ≥ 0) + ½·F₁(x) + q·F₂(x) − q·G_ε(x)` with `G_ε` uniform on `(0, ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCorrected", into = "RawCorrected")]
pub struct CorrectedMixture {
    q: f64,
    epsilon: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawCorrected {
    q: f64,
    epsilon: f64,
}

impl TryFrom<RawCorrected> for CorrectedMixture {
    type Error = Error;
    fn try_from(r: RawCorrected) -> Result<Self> {
        CorrectedMixture::new(r.q, r.epsilon)
    }
}

impl From<CorrectedMixture> for RawCorrected {
    fn from(c: CorrectedMixture) -> Self {
        RawCorrected {
            q: c.q,
            epsilon: c.epsilon,
        }
    }
}

/// Result of inverting a [`CorrectedMixture`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectedQuantile {
    pub value: f64,
    /// The CDF decreases somewhere on the search bracket; `value` is the
    /// smallest root.
    pub non_monotone: bool,
}

/// Shape of the corrected CDF beyond its maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDiagnostic {
    /// Point where the CDF stops increasing, `max(ε, x*)`.
    pub peak_x: f64,
    /// `F(peak_x) − 1`; positive means the CDF overshoots 1 and then decays
    /// back to it.
    pub overshoot: f64,
    /// Whether the CDF is nondecreasing on `[0, peak_x]` (checked on a grid).
    pub monotone_before_peak: bool,
}

impl CorrectedMixture {
    pub fn new(q: f64, epsilon: f64) -> Result<Self> {
        if !(q < 0.0 && q.is_finite() && epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidCorrection { q, epsilon });
        }
        Ok(Self { q, epsilon })
    }

    /// `ε = multiplier · epsilon_root(½, q)`.
    pub fn with_multiplier(q: f64, multiplier: f64) -> Result<Self> {
        if !(multiplier > 0.0 && multiplier.is_finite()) {
            return Err(Error::Precondition(format!(
                "epsilon multiplier must be positive, got {multiplier}"
            )));
        }
        let root = epsilon_root(0.5, q)?;
        Self::new(q, multiplier * root)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Sign change of `½·f₁ + q·f₂`.
    pub fn sign_change(&self) -> f64 {
        2.0 * 0.25 / (PI * self.q * self.q)
    }

    /// Uniform CDF on `(0, ε)`.
    pub fn repair_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (x / self.epsilon).min(1.0)
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        0.5 + 0.5 * chisq_cdf(1, x) + self.q * chisq_cdf(2, x) - self.q * self.repair_cdf(x)
    }

    /// The improper mixture `(½ − q, ½, q)` that the correction replaces.
    pub fn naive_mixture(&self) -> ChiBarMixture {
        ChiBarMixture {
            w0: 0.5 - self.q,
            w1: 0.5,
            w2: self.q,
        }
    }

    pub fn tail_diagnostic(&self) -> TailDiagnostic {
        let peak_x = self.epsilon.max(self.sign_change());
        let grid = 4096;
        let mut prev = self.cdf(0.0);
        let mut monotone = true;
        for i in 1..=grid {
            let f = self.cdf(peak_x * i as f64 / grid as f64);
            if f < prev {
                monotone = false;
            }
            prev = f;
        }
        TailDiagnostic {
            peak_x,
            overshoot: self.cdf(peak_x) - 1.0,
            monotone_before_peak: monotone,
        }
    }

    pub fn quantile(&self, p: f64) -> Result<CorrectedQuantile> {
        check_probability(p)?;
        let diag = self.tail_diagnostic();
        let non_monotone = diag.overshoot > 0.0 || !diag.monotone_before_peak;
        if p <= 0.5 {
            return Ok(CorrectedQuantile {
                value: 0.0,
                non_monotone,
            });
        }
        let cdf = |x| self.cdf(x);
        let hi = BRACKET_HI.max(self.epsilon + BRACKET_HI);
        // Locate the first grid cell reaching p so that the smallest root is
        // returned even if the CDF dips later.
        let cells = 4096;
        let mut lo = 0.0;
        let mut top = hi;
        for i in 1..=cells {
            let x = hi * i as f64 / cells as f64;
            if cdf(x) >= p {
                top = x;
                break;
            }
            lo = x;
        }
        let top = if cdf(top) >= p {
            top
        } else {
            expand_bracket(&cdf, p, hi)
        };
        Ok(CorrectedQuantile {
            value: bisect_up(cdf, p, lo, top),
            non_monotone,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn chisq_cdf_examples() {
        assert_eq!(chisq_cdf(0, 0.0), 1.0);
        assert_eq!(chisq_cdf(0, -1e-300), 0.0);
        assert!((chisq_cdf(2, 5.991465) - 0.95).abs() < 1e-6);
        assert!((chisq_cdf(1, 3.841459) - 0.95).abs() < 1e-6);
        assert_eq!(chisq_cdf(3, -2.0), 0.0);
    }

    #[test]
    fn chisq_cdf_matches_statrs_oracle() {
        for k in 1..=6u32 {
            let oracle = ChiSquared::new(k as f64).unwrap();
            for i in 1..200 {
                let x = i as f64 * 0.173;
                assert!(
                    (chisq_cdf(k, x) - oracle.cdf(x)).abs() < 1e-12,
                    "k={k} x={x}"
                );
                assert!((chisq_sf(k, x) - oracle.sf(x)).abs() < 1e-12, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn chisq_pdf_matches_numerical_derivative() {
        for k in 1..=4u32 {
            for &x in &[0.3, 1.0, 4.0, 9.0] {
                let h = 1e-5;
                let fd = (chisq_cdf(k, x + h) - chisq_cdf(k, x - h)) / (2.0 * h);
                assert!((chisq_pdf(k, x) - fd).abs() < 1e-8, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn chisq_quantile_examples() {
        assert!((chisq_quantile(2, 0.95).unwrap() - 5.991465).abs() < 1e-5);
        assert!((chisq_quantile(2, 0.95).unwrap() + 2.0 * 0.05f64.ln()).abs() < 1e-12);
        // statrs inverse_cdf as an independent oracle
        let oracle = ChiSquared::new(1.0).unwrap().inverse_cdf(0.5);
        let q = chisq_quantile(1, 0.5).unwrap();
        assert!((q - 0.454936).abs() < 1e-4);
        assert!((q - oracle).abs() < 1e-9);
        assert_eq!(chisq_quantile(0, 0.7).unwrap(), 0.0);
        assert!(chisq_quantile(1, 0.0).is_err());
        assert!(chisq_quantile(1, 1.0).is_err());
    }

    #[test]
    fn chisq_quantile_round_trip() {
        for k in 1..=4u32 {
            for &p in &[1e-6, 0.01, 0.3, 0.5, 0.9, 0.99, 0.999999] {
                let x = chisq_quantile(k, p).unwrap();
                assert!((chisq_cdf(k, x) - p).abs() < 1e-10, "k={k} p={p}");
            }
        }
    }

    #[test]
    fn mixture_rejects_bad_weights() {
        assert!(ChiBarMixture::new(0.5, 0.5, 0.1).is_err());
        assert!(ChiBarMixture::new(f64::NAN, 0.5, 0.5).is_err());
        let signed = ChiBarMixture::new(0.6, 0.5, -0.1).unwrap();
        assert!(!signed.is_proper());
        assert!(signed.quantile(0.9).is_err());
        assert!(signed.sample(10, 1).is_err());
    }

    #[test]
    fn chibar_cdf_examples() {
        let half = ChiBarMixture::fifty_fifty();
        assert_eq!(half.cdf(0.0), 0.5);
        assert_eq!(half.cdf(-0.1), 0.0);
        let quarter = ChiBarMixture::new(0.25, 0.5, 0.25).unwrap();
        assert!((quarter.cdf(1e4) - 1.0).abs() < 1e-15);
        // 0.5 + 0.5·F₁(x) = 0.95  ⇔  F₁(x) = 0.9
        let x90 = ChiSquared::new(1.0).unwrap().inverse_cdf(0.9);
        assert!((half.cdf(x90) - 0.95).abs() < 1e-12);
        assert!((x90 - 2.705543).abs() < 1e-6);
    }

    #[test]
    fn chibar_quantile_examples() {
        let half = ChiBarMixture::fifty_fifty();
        assert_eq!(half.quantile(0.4).unwrap(), 0.0);
        assert_eq!(half.quantile(0.5).unwrap(), 0.0);
        assert!((half.quantile(0.95).unwrap() - 2.705543).abs() < 1e-5);
        let quarter = ChiBarMixture::new(0.25, 0.5, 0.25).unwrap();
        let x = quarter.quantile(0.95).unwrap();
        let direct = 0.25 + 0.5 * chisq_cdf(1, x) + 0.25 * (1.0 - (-x / 2.0).exp());
        assert!((direct - 0.95).abs() < 1e-9);
    }

    #[test]
    fn sampling_examples() {
        let atom = ChiBarMixture::new(1.0, 0.0, 0.0).unwrap();
        assert!(atom.sample(1000, 3).unwrap().iter().all(|&v| v == 0.0));

        let n = 100_000;
        let chi1 = ChiBarMixture::new(0.0, 1.0, 0.0).unwrap();
        let s = chi1.sample(n, 5).unwrap();
        let mean = s.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 3.0 * (2.0 / n as f64).sqrt());

        let quarter = ChiBarMixture::new(0.25, 0.5, 0.25).unwrap();
        let s = quarter.sample(n, 6).unwrap();
        let zeros = s.iter().filter(|&&v| v == 0.0).count() as f64 / n as f64;
        assert!((zeros - 0.25).abs() < 3.0 * (0.25 * 0.75 / n as f64).sqrt());

        assert_eq!(
            quarter.sample(50, 9).unwrap(),
            quarter.sample(50, 9).unwrap()
        );
        assert_ne!(
            quarter.sample(50, 9).unwrap(),
            quarter.sample(50, 10).unwrap()
        );
    }

    /// Independent root of the signed density by plain bisection on its sign.
    fn sign_change_by_bisection(probe: SignedDensityProbe) -> f64 {
        let (mut lo, mut hi) = (1e-9, 1e4);
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if probe.density(mid).unwrap() > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn signed_density_examples() {
        let chi1 = SignedDensityProbe::new(0.5, 0.0);
        let want = 0.5 * (-0.5f64).exp() / (2.0 * PI).sqrt();
        assert!((chi1.density(1.0).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.12099).abs() < 1e-5);

        let probe = SignedDensityProbe::new(0.5, -1.0 / 12.0);
        assert!(probe.density(72.0 / PI).unwrap().abs() < 1e-10);
        assert!(probe.density(100.0).unwrap() < 0.0);
        assert!(probe.density(0.0).is_err());
        assert!(probe.density(-1.0).is_err());
    }

    #[test]
    fn epsilon_root_examples() {
        let r = epsilon_root(0.5, -1.0 / 12.0).unwrap();
        assert!((r - 72.0 / PI).abs() < 1e-12);
        let bisected = sign_change_by_bisection(SignedDensityProbe::new(0.5, -1.0 / 12.0));
        assert!((r - bisected).abs() < 1e-8);

        // √(2πx) = 2·w1/|w2| = 2√(2π) gives x = 4.
        let w2 = -0.5 / (2.0 * PI).sqrt();
        assert!((epsilon_root(0.5, w2).unwrap() - 4.0).abs() < 1e-13);

        let r = epsilon_root(1.0, -1.0 / 12.0).unwrap();
        assert!((r - 4.0 * 72.0 / PI).abs() < 1e-10);
        let bisected = sign_change_by_bisection(SignedDensityProbe::new(1.0, -1.0 / 12.0));
        assert!((r - bisected).abs() < 1e-8);

        assert!(matches!(
            epsilon_root(0.5, 0.0),
            Err(Error::NoSignChange(_))
        ));
        assert!(epsilon_root(0.5, 0.1).is_err());
    }

    #[test]
    fn corrected_cdf_examples() {
        let q = -1.0 / 12.0;
        let c = CorrectedMixture::with_multiplier(q, DEFAULT_EPSILON_MULTIPLIER).unwrap();
        assert!((c.epsilon() - 1.01 * 72.0 / PI).abs() < 1e-12);
        assert_eq!(c.cdf(-1.0), 0.0);
        assert_eq!(c.cdf(0.0), 0.5);
        let eps = c.epsilon();
        let oracle = ChiSquared::new(1.0).unwrap().cdf(eps);
        let termwise = 0.5 + 0.5 * oracle + q * (1.0 - (-eps / 2.0).exp()) - q;
        assert!((c.cdf(eps) - termwise).abs() < 1e-13);
        assert!(CorrectedMixture::new(0.1, 1.0).is_err());
        assert!(CorrectedMixture::new(-0.1, 0.0).is_err());
    }

    #[test]
    fn corrected_repair_term_structure() {
        for &q in &[-0.02, -1.0 / 12.0, -0.12] {
            let c = CorrectedMixture::with_multiplier(q, DEFAULT_EPSILON_MULTIPLIER).unwrap();
            for i in 0..=400 {
                let x = i as f64 * 0.1;
                let base = 0.5 + 0.5 * chisq_cdf(1, x) + q * chisq_cdf(2, x);
                let want = -q * (x / c.epsilon()).min(1.0);
                assert!((c.cdf(x) - base - want).abs() < 1e-15, "q={q} x={x}");
            }
        }
    }

    #[test]
    fn corrected_quantile_examples() {
        let c = CorrectedMixture::with_multiplier(-1.0 / 12.0, 1.01).unwrap();
        assert_eq!(c.quantile(0.3).unwrap().value, 0.0);
        let out = c.quantile(0.95).unwrap();
        assert!((c.cdf(out.value) - 0.95).abs() < 1e-9);
        assert!(out.non_monotone, "tail decay past epsilon must be flagged");

        // Continuity at q → 0⁻.
        let tiny = CorrectedMixture::with_multiplier(-1e-8, 1.01).unwrap();
        let half = ChiBarMixture::fifty_fifty();
        for i in 0..=300 {
            let x = i as f64 * 0.05;
            assert!((tiny.cdf(x) - half.cdf(x)).abs() < 1e-6, "x={x}");
        }
        // A CDF gap of |q| moves the quantile by about |q|/f(x_p).
        for &p in &[0.6, 0.9, 0.95, 0.99] {
            let a = tiny.quantile(p).unwrap().value;
            let b = half.quantile(p).unwrap();
            assert!((a - b).abs() < 1e-5, "p={p}: {a} vs {b}");
        }
    }

    #[test]
    fn corrected_cdf_monotone_up_to_peak_then_overshoots() {
        for &q in &[-0.02, -1.0 / 12.0, -0.12, (-0.8f64).asin() / (2.0 * PI)] {
            let c = CorrectedMixture::with_multiplier(q, DEFAULT_EPSILON_MULTIPLIER).unwrap();
            let d = c.tail_diagnostic();
            assert!(d.monotone_before_peak, "q={q}");
            assert_eq!(d.peak_x, c.epsilon());
            // For small |q| the peak sits so far out that F₁ and F₂ round to 1
            // and the overshoot is below double resolution.
            if c.epsilon() < 200.0 {
                assert!(d.overshoot > 0.0, "q={q}: overshoot {}", d.overshoot);
            } else {
                assert!(d.overshoot >= 0.0, "q={q}: overshoot {}", d.overshoot);
            }
            // The decrease after the peak is confined to the overshoot.
            let n = 10_000;
            let top = c.epsilon() + 10.0;
            let mut max_drop: f64 = 0.0;
            let mut prev = c.cdf(0.0);
            for i in 1..=n {
                let f = c.cdf(top * i as f64 / n as f64);
                max_drop = max_drop.max(prev - f);
                prev = f;
            }
            assert!(max_drop <= d.overshoot + 1e-15, "q={q}");
        }
    }

    #[test]
    fn naive_mixture_exceeds_one_past_sign_change() {
        let q = -1.0 / 12.0;
        let c = CorrectedMixture::with_multiplier(q, 1.01).unwrap();
        let naive = c.naive_mixture();
        assert!(!naive.is_proper());
        let x_star = c.sign_change();
        let above = (1..=200)
            .map(|i| x_star + i as f64 * 0.25)
            .any(|x| naive.cdf(x) > 1.0);
        assert!(above);
        assert!(naive.cdf(0.0) < 1.0);
    }

    #[test]
    fn mixture_json_shape() {
        let m = ChiBarMixture::new(0.25, 0.5, 0.25).unwrap();
        assert_eq!(
            serde_json::to_string(&m).unwrap(),
            r#"{"w0":0.25,"w1":0.5,"w2":0.25}"#
        );
        let back: ChiBarMixture =
            serde_json::from_str(r#"{"w0":0.25,"w1":0.5,"w2":0.25}"#).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ChiBarMixture>(r#"{"w0":0.3,"w1":0.5,"w2":0.25}"#).is_err());
        let c = CorrectedMixture::new(-0.125, 2.0).unwrap();
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"q":-0.125,"epsilon":2.0}"#
        );
    }
}
