//! Detectable and undetectable verdicts on both sides of the boundary.

use simsig::boundary::{region_check, CalibrationParams, SolverOptions};

fn main() {
    let opts = SolverOptions::default();
    for beta in [0.6, 0.85, 0.9, 0.93, 0.99] {
        let calib = CalibrationParams::new(100_000, beta, 0.5, 0.5, 0.25, 0.25).unwrap();
        let v = region_check(&calib, &opts).unwrap();
        println!(
            "beta={beta:.2} Q={:+.4?} detectable={} U1={:+.4?} U2={:+.4} undetectable={}",
            v.q_values, v.detectable, v.u1_values, v.u2_value, v.undetectable
        );
    }
}
