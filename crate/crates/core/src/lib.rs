//! Chi-bar-squared mixtures for likelihood ratio tests with two parameters
//! on the boundary of the parameter space.
//!
//! The statistic is the difference of squared distances from the whitened
//! score to the null and alternative tangent cones. [`cones`] computes it,
//! [`weights`] gives its limiting law, [`dist`] evaluates and inverts that
//! law, and [`mc`] simulates it.

pub mod cones;
pub mod dist;
pub mod error;
pub mod linalg2;
pub mod mc;
pub mod rng;
pub mod special;
pub mod weights;

pub use cones::{CaseGeometry, CaseId, Cone2, Region, RegionLabel};
pub use dist::{ChiBarMixture, CorrectedMixture, CorrectedQuantile, SignedDensityProbe};
pub use error::{Error, Result};
pub use linalg2::{Point2, SymPD2};
pub use weights::{Mixture, WeightReport};
