use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Right-continuous empirical CDF of a finite sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    /// Rejects empty samples and NaN.
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::Precondition("sample contains NaN".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of the sample `≤ x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.len() as f64
    }

    /// Fraction of the sample `< x`.
    pub fn eval_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s < x) as f64 / self.len() as f64
    }

    /// Smallest order statistic whose ECDF value reaches `p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        let n = self.len();
        let k = ((p * n as f64).ceil() as usize).clamp(1, n);
        // Guard against p·n landing just above an integer through rounding.
        let k = if k > 1 && (k - 1) as f64 / n as f64 >= p {
            k - 1
        } else {
            k
        };
        Ok(self.sorted[k - 1])
    }

    /// Distinct sample values in increasing order.
    pub fn jumps(&self) -> impl Iterator<Item = f64> + '_ {
        let mut last = None;
        self.sorted.iter().copied().filter(move |&x| {
            let fresh = last != Some(x);
            last = Some(x);
            fresh
        })
    }
}

/// `sup |F_n − F|` over the sample, checked on both sides of every jump.
/// The left side of a jump at `x` compares `F_n(x−)` against `F` at the
/// previous float.
pub fn ks_distance<F: Fn(f64) -> f64>(ecdf: &EmpiricalCdf, cdf: F) -> f64 {
    ecdf.jumps()
        .map(|x| {
            let right = (ecdf.eval(x) - cdf(x)).abs();
            let left = (ecdf.eval_left(x) - cdf(x.next_down())).abs();
            right.max(left)
        })
        .fold(0.0, f64::max)
}

/// `sup |F_n − G_m|` between two empirical CDFs.
pub fn ks_two_sample(a: &EmpiricalCdf, b: &EmpiricalCdf) -> f64 {
    ks_distance(a, |x| b.eval(x)).max(ks_distance(b, |x| a.eval(x)))
}

/// Dvoretzky–Kiefer–Wolfowitz radius: `P(sup |F_n − F| > r) ≤ δ` for
/// `r = √(ln(2/δ)/(2n))`.
pub fn dkw_bound(n: usize, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sample() {
        let e = EmpiricalCdf::new(&[2.0, 0.0, 1.0]).unwrap();
        assert!((e.eval(1.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(e.eval(-0.1), 0.0);
        assert_eq!(e.eval(2.0), 1.0);
        assert_eq!(e.quantile(0.5).unwrap(), 1.0);
        assert_eq!(e.quantile(1.0 / 3.0).unwrap(), 0.0);
        assert_eq!(e.quantile(1.0).unwrap(), 2.0);
        assert!(EmpiricalCdf::new(&[]).is_err());
        assert!(e.quantile(0.0).is_err());
    }

    #[test]
    fn quantile_is_lower_quantile() {
        let xs: Vec<f64> = (0..100).map(f64::from).collect();
        let e = EmpiricalCdf::new(&xs).unwrap();
        for p in [0.01, 0.05, 0.5, 0.95, 0.99, 0.999] {
            let q = e.quantile(p).unwrap();
            assert!(e.eval(q) >= p);
            assert!(e.eval_left(q) < p, "p={p}");
        }
    }

    #[test]
    fn ks_against_itself_is_zero() {
        let e = EmpiricalCdf::new(&[0.0, 0.0, 0.5, 1.0, 3.0]).unwrap();
        assert_eq!(ks_distance(&e, |x| e.eval(x)), 0.0);
        assert_eq!(ks_two_sample(&e, &e), 0.0);
    }

    #[test]
    fn ks_sees_left_limit() {
        // A single point at 1 against the uniform CDF on (0, 2): the largest
        // gap is just below the jump.
        let e = EmpiricalCdf::new(&[1.0]).unwrap();
        let d = ks_distance(&e, |x: f64| (x / 2.0).clamp(0.0, 1.0));
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dkw_value() {
        assert!((dkw_bound(100_000, 0.01) - 0.005_146).abs() < 1e-6);
    }
}
