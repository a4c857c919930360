//! Seeded Monte Carlo for the likelihood ratio statistic and the empirical
//! CDF tools used to compare it with analytic laws.

mod compare;
mod ecdf;
mod sim;

pub use compare::{
    run_compare, selfliang_reference, CompareConfig, CompareReport, OverlayReport, QuantileCheck,
    COMPARE_PROBS, OVERLAY_SEED_OFFSET,
};
pub use ecdf::{dkw_bound, ks_distance, ks_two_sample, EmpiricalCdf};
pub use sim::{
    simulate, simulate_data_level, simulate_score_level, SimConfig, SimMetadata, SimMode,
    SimResult, CHUNK_SIZE, DEFAULT_REPS, DEFAULT_SAMPLE_SIZE,
};
