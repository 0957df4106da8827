//! Signals too weak to detect in `t1` alone become visible through their
//! overlap with strong signals in `t2`. Replicates default to 50.
//!
//!     cargo run --release --example single_sequence_power -- 400

use simsig::simulation::{run_experiment, write_reports_csv, ExperimentConfig, Hypothesis};

fn main() {
    let reps = std::env::args().nth(1).map_or(50, |s| s.parse().expect("replicate count"));
    let mut reports = Vec::new();
    for (i, beta1) in [0.51, 0.6, 0.7].into_iter().enumerate() {
        let mut cfg = ExperimentConfig::table3(beta1, Hypothesis::Alternative, 300 + i as u64).unwrap();
        cfg.replicates = reps;
        let c = cfg.counts;
        eprintln!("beta1={beta1}: n1={} n2={} n12={}", c.n1, c.n2, c.n12);
        reports.push(run_experiment(&cfg).unwrap());
    }
    write_reports_csv(std::io::stdout().lock(), &reports).unwrap();
}
