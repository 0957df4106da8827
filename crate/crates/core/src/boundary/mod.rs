//! Asymptotic detection theory for the calibrated two-sequence model.

mod alpha;
mod curve;
mod regions;
mod solver;
mod tail;

pub use alpha::{alpha_normal, v_funcs, AlphaFunctions, GaussianAlpha, TabulatedAlpha};
pub use curve::{boundary_curve, write_boundary_csv, BoundaryPoint};
pub use regions::{
    boundary_beta, detectable_region_check, region_check, single_seq_boundary, undetectable_region_check,
    CalibrationParams, DetectableRegion, RegionProblem, RegionVerdict, SolverOptions, UndetectableRegion,
};
pub use tail::{tail_approx_check, TailCheck};
