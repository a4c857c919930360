use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cones::{lrs_quadratic, CaseGeometry, CaseId, Region};
use crate::error::{Error, Result};
use crate::linalg2::{canonical_whitening, invert_spd2, Point2, SymPD2};
use crate::rng::{self, PolarNormal};

/// Replicates per generator stream. Part of the reproducibility contract:
/// changing it changes every simulated sample.
pub const CHUNK_SIZE: usize = 4096;

pub const DEFAULT_REPS: usize = 100_000;
pub const DEFAULT_SAMPLE_SIZE: usize = 250;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    /// Whitened score drawn directly from the standard bivariate normal.
    ScoreLevel,
    /// Bivariate-normal-mean model with `sample_size` observations.
    DataLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub mode: SimMode,
    /// Also selects the geometry variant for Case 8.
    pub case_id: CaseId,
    pub rho: f64,
    pub reps: usize,
    pub sample_size: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(mode: SimMode, case_id: CaseId, rho: f64, seed: u64) -> Self {
        Self {
            mode,
            case_id,
            rho,
            reps: DEFAULT_REPS,
            sample_size: DEFAULT_SAMPLE_SIZE,
            seed,
        }
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.reps = reps;
        self
    }

    pub fn with_sample_size(mut self, n: usize) -> Self {
        self.sample_size = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(Error::Precondition("reps must be at least 1".into()));
        }
        if self.mode == SimMode::DataLevel && self.sample_size < 2 {
            return Err(Error::Precondition("sample size must be at least 2".into()));
        }
        if !(self.rho > -1.0 && self.rho < 1.0) {
            return Err(Error::CorrelationOutOfRange(self.rho));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimMetadata {
    pub rng: String,
    pub normal_sampler: String,
    pub chunk_size: usize,
}

impl Default for SimMetadata {
    fn default() -> Self {
        Self {
            rng: rng::RNG_NAME.into(),
            normal_sampler: rng::NORMAL_SAMPLER_NAME.into(),
            chunk_size: CHUNK_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub config: SimConfig,
    pub metadata: SimMetadata,
    pub lrs_samples: Vec<f64>,
    pub region_counts: BTreeMap<Region, u64>,
    /// Replicates with a negative statistic.
    pub negative_count: u64,
    /// Whitened score per replicate, in the canonical frame.
    #[serde(skip)]
    pub scores: Vec<Point2>,
}

impl SimResult {
    pub fn region_frequency(&self, region: Region) -> f64 {
        *self.region_counts.get(&region).unwrap_or(&0) as f64 / self.lrs_samples.len() as f64
    }
}

struct Draw {
    lrs: f64,
    region: Region,
    score: Point2,
}

fn run<F>(cfg: &SimConfig, draw: F) -> Result<SimResult>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<Draw> + Sync,
{
    cfg.validate()?;
    let chunks = cfg.reps.div_ceil(CHUNK_SIZE);
    let per_chunk: Vec<Result<Vec<Draw>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng::stream(cfg.seed, c as u64);
            let len = CHUNK_SIZE.min(cfg.reps - c * CHUNK_SIZE);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();

    let mut lrs_samples = Vec::with_capacity(cfg.reps);
    let mut scores = Vec::with_capacity(cfg.reps);
    let mut region_counts = BTreeMap::new();
    let mut negative_count = 0;
    for chunk in per_chunk {
        for d in chunk? {
            if d.lrs < 0.0 {
                negative_count += 1;
            }
            *region_counts.entry(d.region).or_insert(0) += 1;
            lrs_samples.push(d.lrs);
            scores.push(d.score);
        }
    }
    Ok(SimResult {
        config: *cfg,
        metadata: SimMetadata::default(),
        lrs_samples,
        region_counts,
        negative_count,
        scores,
    })
}

/// Draws `Z̃ ~ N(0, I₂)` and evaluates the whitened statistic.
pub fn simulate_score_level(cfg: &SimConfig) -> Result<SimResult> {
    if cfg.mode != SimMode::ScoreLevel {
        return Err(Error::Precondition("config mode is not score_level".into()));
    }
    cfg.validate()?;
    let geom = CaseGeometry::new(cfg.case_id, cfg.rho)?;
    run(cfg, |rng| {
        let (a, b) = PolarNormal::pair(rng);
        let z = Point2::new(a, b);
        Ok(Draw {
            lrs: geom.lrs_whitened(z)?,
            region: geom.classify(z).region,
            score: z,
        })
    })
}

/// `X₁..X_N ~ N(θ₀, V)` with `θ₀ = 0` and `V = [[1, ρ], [ρ, 1]]`, so the
/// information is `V⁻¹` and its induced score correlation is `ρ`. The
/// constrained MLEs are projections of the sample mean in the `V⁻¹` metric
/// and the statistic is `N·[Q(θ̂₀) − Q(θ̂₁)]`.
pub fn simulate_data_level(cfg: &SimConfig) -> Result<SimResult> {
    if cfg.mode != SimMode::DataLevel {
        return Err(Error::Precondition("config mode is not data_level".into()));
    }
    cfg.validate()?;
    let rho = cfg.rho;
    let cov = SymPD2::unit_correlation(rho)?;
    let info = invert_spd2(&cov)?;
    let original = CaseGeometry::original(cfg.case_id, rho)?;
    let whitened = CaseGeometry::new(cfg.case_id, rho)?;
    let whiten = canonical_whitening(&info);
    let (l21, l22) = (rho, (1.0 - rho * rho).sqrt());
    let n = cfg.sample_size;
    let root_n = (n as f64).sqrt();
    run(cfg, |rng| {
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let (a, b) = PolarNormal::pair(rng);
            s1 += a;
            s2 += l21 * a + l22 * b;
        }
        let mean = Point2::new(s1 / n as f64, s2 / n as f64);
        let lrs = n as f64 * lrs_quadratic(&info, &original.null_cone, &original.alt_cone, mean)?;
        let score = whiten.apply(mean * root_n);
        Ok(Draw {
            lrs,
            region: whitened.classify(score).region,
            score,
        })
    })
}

pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    match cfg.mode {
        SimMode::ScoreLevel => simulate_score_level(cfg),
        SimMode::DataLevel => simulate_data_level(cfg),
    }
}
