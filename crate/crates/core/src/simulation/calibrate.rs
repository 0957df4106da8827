//! Exponent calibration of sparsity and dependence, and its signal counts.

use serde::{Deserialize, Serialize};

use crate::boundary::CalibrationParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub pi1: f64,
    pub pi2: f64,
    /// `pi1 pi2 + p^-beta`.
    pub eps: f64,
    pub n1: usize,
    pub n2: usize,
    /// Simultaneous signals, `round(p^(1 - beta))`.
    pub n12: usize,
}

/// `pi_k = p^-beta_k`, `n_k = round(p pi_k)`, `n12 = round(p^(1 - beta))`.
pub fn calibrate(p: usize, beta: f64, beta1: f64, beta2: f64) -> Result<Calibration> {
    let c = CalibrationParams {
        p,
        beta,
        beta1,
        beta2,
        r1: 0.0,
        r2: 0.0,
    };
    c.validate()?;
    let pf = p as f64;
    let (pi1, pi2) = (c.pi1(), c.pi2());
    let n1 = (pf * pi1).round() as usize;
    let n2 = (pf * pi2).round() as usize;
    let n12 = pf.powf(1.0 - beta).round() as usize;
    if n12 > n1.min(n2) {
        return Err(Error::InvalidCalibration(format!(
            "{n12} simultaneous signals exceed min(n1, n2) = {}",
            n1.min(n2)
        )));
    }
    Ok(Calibration {
        pi1,
        pi2,
        eps: c.epsilon(),
        n1,
        n2,
        n12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_at_one_hundred_thousand() {
        let p = 100_000;
        let n1: Vec<usize> = [0.51, 0.6, 0.7]
            .iter()
            .map(|&b1| calibrate(p, b1 + 0.01, b1, 0.5).unwrap().n1)
            .collect();
        assert_eq!(n1, vec![282, 100, 32]);
        assert_eq!(calibrate(p, 0.61, 0.6, 0.5).unwrap().n2, 316);
        let n12: Vec<usize> = [0.52, 0.61, 0.71]
            .iter()
            .map(|&b| calibrate(p, b, b - 0.01, 0.5).unwrap().n12)
            .collect();
        assert_eq!(n12, vec![251, 89, 28]);
    }

    #[test]
    fn epsilon_exceeds_independent_overlap() {
        let c = calibrate(1000, 0.7, 0.6, 0.6).unwrap();
        assert!(c.eps > c.pi1 * c.pi2);
        assert!((c.eps - c.pi1 * c.pi2 - 1000f64.powf(-0.7)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(matches!(calibrate(1000, 1.2, 0.6, 0.6), Err(Error::InvalidCalibration(_))));
        assert!(matches!(calibrate(1000, 0.55, 0.6, 0.6), Err(Error::InvalidCalibration(_))));
    }
}
