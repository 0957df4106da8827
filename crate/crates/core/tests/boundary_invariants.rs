use simsig::boundary::{boundary_beta, region_check, CalibrationParams, SolverOptions};
use simsig::rng::stream_rng;

use rand::Rng;

#[test]
fn verdicts_complementary_away_from_boundary() {
    let opts = SolverOptions::with_res(256);
    let mut rng = stream_rng(31, 0);
    let mut checked = 0;
    for _ in 0..400 {
        let beta = rng.random_range(0.501..0.999);
        let calib = CalibrationParams::new(
            10_000,
            beta,
            rng.random_range(0.5..=beta),
            rng.random_range(0.5..=beta),
            rng.random_range(0.01..3.0),
            rng.random_range(0.01..3.0),
        )
        .unwrap();
        let v = region_check(&calib, &opts).unwrap();
        if v.q_values[0].abs() > 0.05 {
            assert!(v.detectable != v.undetectable, "{calib:?} {v:?}");
            checked += 1;
        }
    }
    assert!(checked > 200);
}

#[test]
fn grid_refinement_is_stable() {
    let coarse = SolverOptions::with_res(256);
    let fine = SolverOptions::with_res(512);
    for &(beta, b1, b2, r1, r2) in &[
        (0.9, 0.5, 0.5, 0.25, 0.25),
        (0.7, 0.5, 0.6, 0.1, 0.8),
        (0.95, 0.8, 0.5, 2.0, 0.05),
        (0.6, 0.55, 0.55, 0.02, 0.02),
    ] {
        let calib = CalibrationParams::new(10_000, beta, b1, b2, r1, r2).unwrap();
        let (a, b) = (region_check(&calib, &coarse).unwrap(), region_check(&calib, &fine).unwrap());
        let pairs = a.q_values.iter().zip(&b.q_values).chain(a.u1_values.iter().zip(&b.u1_values));
        for (x, y) in pairs.chain([(&a.u2_value, &b.u2_value)]) {
            assert!((x - y).abs() < 1e-3, "{calib:?}: {x} vs {y}");
        }
    }
}

#[test]
fn boundary_monotone_in_strength() {
    let opts = SolverOptions::with_res(256);
    let mut prev = 0.5;
    for i in 1..=10 {
        let r = 0.06 * i as f64;
        let b = boundary_beta(0.5, 0.5, r, r, &opts, 1e-6).unwrap();
        assert!(b >= prev - 1e-6, "r={r}: {b} < {prev}");
        prev = b;
    }
    assert_eq!(prev, 1.0);
}
