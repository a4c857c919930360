use serde::{Deserialize, Serialize};

use super::ecdf::{dkw_bound, ks_distance, ks_two_sample, EmpiricalCdf};
use super::sim::{simulate_data_level, simulate_score_level, SimConfig, SimMode};
use crate::cones::CaseId;
use crate::dist::{ChiBarMixture, DEFAULT_EPSILON_MULTIPLIER};
use crate::error::Result;
use crate::weights::{case8_any, Mixture};

pub const COMPARE_PROBS: [f64; 2] = [0.95, 0.99];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub rho: f64,
    pub reps: usize,
    pub sample_size: usize,
    pub seed: u64,
    pub epsilon_multiplier: f64,
    /// DKW confidence parameter for the KS band.
    pub delta: f64,
    /// Allowed `|F_n(x_p) − p|` at the overlay quantiles.
    pub quantile_tol: f64,
}

impl CompareConfig {
    pub fn new(rho: f64, seed: u64) -> Self {
        Self {
            rho,
            reps: super::DEFAULT_REPS,
            sample_size: super::DEFAULT_SAMPLE_SIZE,
            seed,
            epsilon_multiplier: DEFAULT_EPSILON_MULTIPLIER,
            delta: 0.01,
            quantile_tol: 0.006,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileCheck {
    pub p: f64,
    /// Overlay quantile `x_p`.
    pub overlay: f64,
    /// Lower empirical quantile of the data-level sample.
    pub empirical: f64,
    /// `overlay − empirical`.
    pub delta: f64,
    /// `F_n(x_p)`.
    pub ecdf_at_overlay: f64,
    /// `|F_n(x_p) − p|`.
    pub coverage_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlayReport {
    pub name: String,
    pub ks: f64,
    pub quantiles: Vec<QuantileCheck>,
}

impl OverlayReport {
    pub fn max_coverage_error(&self) -> f64 {
        self.quantiles
            .iter()
            .map(|q| q.coverage_error)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub config: CompareConfig,
    pub dkw_bound: f64,
    /// Name of the overlay the pass/fail decision is made on.
    pub primary: String,
    pub primary_ks_pass: bool,
    pub primary_quantile_pass: bool,
    pub pass: bool,
    pub overlays: Vec<OverlayReport>,
}

impl CompareReport {
    pub fn overlay(&self, name: &str) -> Option<&OverlayReport> {
        self.overlays.iter().find(|o| o.name == name)
    }
}

fn analytic_overlay(name: &str, ecdf: &EmpiricalCdf, m: &Mixture) -> Result<OverlayReport> {
    let ks = ks_distance(ecdf, |x| m.cdf(x));
    let quantiles = COMPARE_PROBS
        .iter()
        .map(|&p| {
            let overlay = m.quantile(p)?;
            check(ecdf, p, overlay)
        })
        .collect::<Result<_>>()?;
    Ok(OverlayReport {
        name: name.into(),
        ks,
        quantiles,
    })
}

fn check(ecdf: &EmpiricalCdf, p: f64, overlay: f64) -> Result<QuantileCheck> {
    let empirical = ecdf.quantile(p)?;
    let at = ecdf.eval(overlay);
    Ok(QuantileCheck {
        p,
        overlay,
        empirical,
        delta: overlay - empirical,
        ecdf_at_overlay: at,
        coverage_error: (at - p).abs(),
    })
}

/// Seed offset for overlay simulations, so the overlay sample never shares
/// streams with the data sample it is compared against.
pub const OVERLAY_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

/// Score-level ECDF of the statistic under the half-plane alternative.
pub fn selfliang_reference(rho: f64, reps: usize, seed: u64) -> Result<EmpiricalCdf> {
    let cfg = SimConfig::new(
        SimMode::ScoreLevel,
        CaseId::Case8Selfliang,
        rho,
        seed.wrapping_add(OVERLAY_SEED_OFFSET),
    )
    .with_reps(reps);
    EmpiricalCdf::new(&simulate_score_level(&cfg)?.lrs_samples)
}

/// Data-level Case 8 simulation compared against the analytic law for `ρ`
/// (the corrected mixture when `ρ < 0`), the 50:50 mixture, and a
/// score-level simulation under the half-plane alternative.
pub fn run_compare(cfg: &CompareConfig) -> Result<CompareReport> {
    let data_cfg = SimConfig::new(SimMode::DataLevel, CaseId::Case8Correct, cfg.rho, cfg.seed)
        .with_reps(cfg.reps)
        .with_sample_size(cfg.sample_size);
    let data = simulate_data_level(&data_cfg)?;
    let ecdf = EmpiricalCdf::new(&data.lrs_samples)?;

    let law = case8_any(cfg.rho, cfg.epsilon_multiplier)?;
    let primary = match law.mixture {
        Mixture::Corrected(_) => "corrected",
        Mixture::Proper(_) => "chibar",
    };
    let mut overlays = vec![
        analytic_overlay(primary, &ecdf, &law.mixture)?,
        analytic_overlay(
            "fifty_fifty",
            &ecdf,
            &Mixture::Proper(ChiBarMixture::fifty_fifty()),
        )?,
    ];

    let sl = selfliang_reference(cfg.rho, cfg.reps, cfg.seed)?;
    overlays.push(OverlayReport {
        name: "selfliang".into(),
        ks: ks_two_sample(&ecdf, &sl),
        quantiles: COMPARE_PROBS
            .iter()
            .map(|&p| check(&ecdf, p, sl.quantile(p)?))
            .collect::<Result<_>>()?,
    });

    let dkw = dkw_bound(cfg.reps, cfg.delta);
    let primary_ks_pass = overlays[0].ks < dkw;
    let primary_quantile_pass = overlays[0].max_coverage_error() < cfg.quantile_tol;
    Ok(CompareReport {
        config: *cfg,
        dkw_bound: dkw,
        primary: primary.into(),
        primary_ks_pass,
        primary_quantile_pass,
        pass: primary_ks_pass && primary_quantile_pass,
        overlays,
    })
}
