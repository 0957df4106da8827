//! Null rejection rates with heterogeneous signals that never coincide
//! beyond chance. Replicates default to 100; pass a count to change it.
//!
//!     cargo run --release --example type_one_error -- 400

use simsig::simulation::{run_experiment, write_reports_csv, ExperimentConfig};

fn main() {
    let reps = std::env::args().nth(1).map_or(100, |s| s.parse().expect("replicate count"));
    let settings = [(5, 5), (10, 5), (15, 5), (10, 10), (15, 10), (15, 15)];
    let reports: Vec<_> = settings
        .iter()
        .map(|&(n1, n2)| {
            let mut cfg = ExperimentConfig::table1(n1, n2, 1);
            cfg.replicates = reps;
            let report = run_experiment(&cfg).unwrap();
            eprintln!("{}: {} features non-null in both by chance", cfg.label, report.overlap);
            report
        })
        .collect();
    write_reports_csv(std::io::stdout().lock(), &reports).unwrap();
}
