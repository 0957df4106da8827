//! Standard normal helpers.

use statrs::distribution::{ContinuousCDF, Normal};
use libm::erfc;

/// Lower tail `P(Z <= x)`.
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Upper tail `P(Z > x)`, accurate far into the right tail.
pub fn sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Quantile function.
pub fn quantile(prob: f64) -> f64 {
    Normal::standard().inverse_cdf(prob)
}

/// `ln P(Z <= x)`, finite for arbitrarily negative `x`.
pub fn ln_cdf(x: f64) -> f64 {
    if x > -30.0 {
        return cdf(x).ln();
    }
    // asymptotic Mills-ratio expansion
    let z2 = x * x;
    let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    -0.5 * z2 - (-x).ln() - 0.5 * (2.0 * std::f64::consts::PI).ln() + series.ln()
}

/// Two-sided p-value `2 P(Z > |t|)`.
pub fn two_sided_pvalue(t: f64) -> f64 {
    erfc(t.abs() / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((cdf(1.959963984540054) - 0.975).abs() < 1e-15);
        assert!((sf(8.0) / 6.22096057427178e-16 - 1.0).abs() < 1e-13);
        assert!((quantile(0.975) - 1.959963984540054).abs() < 1e-9);
        assert!((ln_cdf(-5.0) - cdf(-5.0).ln()).abs() < 1e-12);
        // continuity across the switch to the expansion
        assert!((ln_cdf(-30.0 - 1e-9) - ln_cdf(-30.0 + 1e-9)).abs() < 1e-6);
        assert!(ln_cdf(-100.0).is_finite());
        assert!((two_sided_pvalue(-1.959963984540054) - 0.05).abs() < 1e-12);
    }
}
