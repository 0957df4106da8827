//! Fixed-effect simulation of paired sequences and baseline statistics.

mod baselines;
mod calibrate;
mod design;
mod experiment;

pub use baselines::{average_ranks, hc_stat, max_test_stat, spearman_test, HigherCriticism, SpearmanResult};
pub use calibrate::{calibrate, Calibration};
pub use design::{
    assign_latent, gen_correlated_design, heterogeneous_alternative, sample_pairs, sample_pairs_with, AltSpec,
    CorrelatedDesign, Dist, Hypothesis, LatentAssignment, MixtureSpec, Noise, SequenceSpec,
};
pub use experiment::{
    run_experiment, write_reports_csv, AltModel, ExperimentConfig, ExperimentReport, Method, MethodOutcome,
    SequenceModel, SignalCounts,
};

pub(crate) use baselines::SpearmanRanks;
