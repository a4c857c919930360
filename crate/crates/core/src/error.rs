use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite (a11={a11}, a12={a12}, a22={a22})")]
    NotPositiveDefinite { a11: f64, a12: f64, a22: f64 },

    #[error("matrix is not symmetric: a12={a12} but a21={a21}")]
    Asymmetric { a12: f64, a21: f64 },

    #[error("correlation {0} outside the open interval (-1, 1)")]
    CorrelationOutOfRange(f64),

    #[error("probability {0} outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),

    #[error("mixture weights {w0}, {w1}, {w2} do not sum to 1")]
    WeightsDoNotSum { w0: f64, w1: f64, w2: f64 },

    #[error("mixture has a negative weight and cannot be {0}")]
    ImproperMixture(&'static str),

    #[error("invalid corrected mixture: q={q} must be negative and epsilon={epsilon} positive")]
    InvalidCorrection { q: f64, epsilon: f64 },

    #[error("signed density is undefined at x={0}; require x > 0")]
    DensityDomain(f64),

    #[error("no sign change: chi-squared(2) weight {0} must be negative")]
    NoSignChange(f64),

    #[error("invalid cone: {0}")]
    InvalidCone(&'static str),

    #[error("null cone is not contained in the alternative cone")]
    NotNested,

    #[error("{0}")]
    Precondition(String),

    #[error("empirical CDF needs at least one sample")]
    EmptySample,
}
