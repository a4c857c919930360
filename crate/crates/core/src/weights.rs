//! Mixture weights for the two boundary configurations.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::cones::CaseId;
use crate::dist::{ChiBarMixture, CorrectedMixture};
use crate::error::{Error, Result};
use crate::linalg2::{correlation_from_information, SymPD2};

const EQUIVALENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Mixture {
    Proper(ChiBarMixture),
    Corrected(CorrectedMixture),
}

impl Mixture {
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Mixture::Proper(m) => m.cdf(x),
            Mixture::Corrected(c) => c.cdf(x),
        }
    }

    /// Weights `(w0, w1, w2)`; for the corrected law these are the naive
    /// weights `(½ − q, ½, q)` before the repair term.
    pub fn weights(&self) -> [f64; 3] {
        match self {
            Mixture::Proper(m) => m.weights(),
            Mixture::Corrected(c) => c.naive_mixture().weights(),
        }
    }

    /// Lower quantile; for the corrected law, the smallest root.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        match self {
            Mixture::Proper(m) => m.quantile(p),
            Mixture::Corrected(c) => Ok(c.quantile(p)?.value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightReport {
    pub case_id: CaseId,
    pub rho: f64,
    pub mixture: Mixture,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_sl: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_ks: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub equivalence: Option<bool>,
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > -1.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::CorrelationOutOfRange(rho))
    }
}

/// Weights from the information-matrix angle:
/// `p_SL = arccos(I₁₂/√(I₁₁I₂₂))/(2π)`, mixture `(½ − p_SL, ½, p_SL)`.
pub fn case7_weights_sl(info: &SymPD2) -> WeightReport {
    let p_sl = info.correlation().clamp(-1.0, 1.0).acos() / TAU;
    WeightReport {
        case_id: CaseId::Case7,
        rho: correlation_from_information(info),
        mixture: Mixture::Proper(
            ChiBarMixture::new(0.5 - p_sl, 0.5, p_sl).expect("p_sl lies in (0, 1/2)"),
        ),
        p_sl: Some(p_sl),
        p_ks: None,
        q: None,
        equivalence: None,
    }
}

/// Weights from the score correlation: `p_KS = arccos(ρ)/(2π)`, mixture
/// `(p_KS, ½, ½ − p_KS)`.
pub fn case7_weights_ks(rho: f64) -> Result<WeightReport> {
    check_rho(rho)?;
    let p_ks = rho.acos() / TAU;
    Ok(WeightReport {
        case_id: CaseId::Case7,
        rho,
        mixture: Mixture::Proper(ChiBarMixture::new(p_ks, 0.5, 0.5 - p_ks)?),
        p_sl: None,
        p_ks: Some(p_ks),
        q: None,
        equivalence: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Case7Equivalence {
    pub holds: bool,
    pub rho: f64,
    pub p_sl: f64,
    pub p_ks: f64,
    /// `sl − ks` per weight.
    pub deltas: [f64; 3],
    /// `p_sl + p_ks − ½`.
    pub angle_sum_error: f64,
}

/// Checks that both routes give the same mixture once the score correlation
/// is taken from `Σ = I⁻¹`.
pub fn case7_equivalence(info: &SymPD2) -> Result<Case7Equivalence> {
    let sl = case7_weights_sl(info);
    let rho = sl.rho;
    let ks = case7_weights_ks(rho)?;
    let (a, b) = (sl.mixture.weights(), ks.mixture.weights());
    let deltas = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let p_sl = sl.p_sl.expect("set by case7_weights_sl");
    let p_ks = ks.p_ks.expect("set by case7_weights_ks");
    let angle_sum_error = p_sl + p_ks - 0.5;
    let holds = deltas.iter().all(|d| d.abs() <= EQUIVALENCE_TOL)
        && angle_sum_error.abs() <= EQUIVALENCE_TOL;
    Ok(Case7Equivalence {
        holds,
        rho,
        p_sl,
        p_ks,
        deltas,
        angle_sum_error,
    })
}

/// `q = arcsin(ρ)/(2π)`.
pub fn case8_q(rho: f64) -> f64 {
    rho.asin() / TAU
}

/// `(½ − q, ½, q)` for `0 ≤ ρ < 1`.
pub fn case8_weights(rho: f64) -> Result<WeightReport> {
    check_rho(rho)?;
    if rho < 0.0 {
        return Err(Error::Precondition(format!(
            "rho = {rho} < 0 makes the chi-squared(2) weight negative; use case8_corrected"
        )));
    }
    let q = case8_q(rho);
    Ok(WeightReport {
        case_id: CaseId::Case8Correct,
        rho,
        mixture: Mixture::Proper(ChiBarMixture::new(0.5 - q, 0.5, q)?),
        p_sl: None,
        p_ks: None,
        q: Some(q),
        equivalence: None,
    })
}

/// Corrected law for `−1 < ρ < 0`, `ε = multiplier · epsilon_root(½, q)`.
pub fn case8_corrected(rho: f64, epsilon_multiplier: f64) -> Result<WeightReport> {
    check_rho(rho)?;
    if rho >= 0.0 {
        return Err(Error::Precondition(format!(
            "rho = {rho} >= 0 needs no correction; use case8_weights"
        )));
    }
    let q = case8_q(rho);
    Ok(WeightReport {
        case_id: CaseId::Case8Correct,
        rho,
        mixture: Mixture::Corrected(CorrectedMixture::with_multiplier(q, epsilon_multiplier)?),
        p_sl: None,
        p_ks: None,
        q: Some(q),
        equivalence: None,
    })
}

/// Case 8 law for any `ρ`: the mixture for `ρ ≥ 0`, the corrected law below.
pub fn case8_any(rho: f64, epsilon_multiplier: f64) -> Result<WeightReport> {
    if rho < 0.0 {
        case8_corrected(rho, epsilon_multiplier)
    } else {
        case8_weights(rho)
    }
}

pub fn fifty_fifty() -> ChiBarMixture {
    ChiBarMixture::fifty_fifty()
}
