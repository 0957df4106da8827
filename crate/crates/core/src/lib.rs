//! Detection of weak positive dependence between the latent signal
//! indicators of two paired sequences of test statistics.
//!
//! The crate computes the supremum-type statistic over 2x2 tables induced
//! by pairs of thresholds, calibrates it by permutation or cyclic shifting,
//! evaluates the detectable and undetectable regions of the Gaussian
//! rare/weak signal model, and runs fixed-effect simulation experiments.

pub mod boundary;
pub mod cli;
pub mod empirical;
pub mod error;
pub mod inference;
pub mod normal;
pub mod rng;
pub mod simulation;

pub use empirical::{
    dstat_fast, dstat_naive, dstat_oracle, preprocess, DetectionResult, PairedStatistics,
    RankedPairs, TruncationConfig,
};
pub use error::{Error, Result};
