//! Rank preprocessing and the supremum-type dependence statistic.

mod grid;
mod oracle;
mod pairs;

pub use grid::{cell_statistic, dstat_fast, dstat_naive, statistic_from_counts, DetectionResult};
pub(crate) use grid::Grid;
pub use oracle::dstat_oracle;
pub use pairs::{preprocess, PairedStatistics, RankedPairs, RankedSequence, TruncationConfig};
