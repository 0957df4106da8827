//! Detection boundary of the Gaussian model: the largest dependence
//! exponent that is still detectable, as a CSV over signal strengths.

use simsig::boundary::{boundary_curve, single_seq_boundary, write_boundary_csv, SolverOptions};

fn main() {
    let opts = SolverOptions::with_res(256);
    let tol = 1e-4;
    let grid: Vec<(f64, f64, f64, f64)> = (1..=12)
        .map(|i| {
            let r = 0.05 * i as f64;
            (0.5, 0.5, r, r)
        })
        .chain([(0.6, 0.6, 1.0, 1.0), (0.7, 0.5, 0.3, 2.0)])
        .collect();
    let points = boundary_curve(&grid, &opts, tol).unwrap();
    write_boundary_csv(std::io::stdout().lock(), &points, &opts, tol).unwrap();

    eprintln!("single sequence boundary r*(beta):");
    for beta in [0.55, 0.65, 0.75, 0.85, 0.95] {
        eprintln!("  {beta:.2} {:.4}", single_seq_boundary(beta).unwrap());
    }
}
