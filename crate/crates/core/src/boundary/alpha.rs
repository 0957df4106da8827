//! Log-likelihood-ratio exponents of the tails of the signal distribution.
//!
//! For a non-null distribution `F1` against null `F0`, `alpha_minus(a)` and
//! `alpha_plus(a)` are the limits of `log(f1/f0) / log p` at the null
//! quantiles `p^-a` and `1 - p^-a`. The `v` functions are
//! `v(x) = sup_{a >= x} (alpha(a) - a)`.

/// Tail exponents of one sequence.
pub trait AlphaFunctions: Send + Sync {
    fn alpha_minus(&self, a: f64) -> f64;
    fn alpha_plus(&self, a: f64) -> f64;

    fn alpha(&self, a: f64) -> f64 {
        self.alpha_minus(a).max(self.alpha_plus(a))
    }

    fn v_minus(&self, x: f64) -> f64;
    fn v_plus(&self, x: f64) -> f64;

    /// Points where the region objectives may have kinks, given the
    /// sequence's sparsity exponent. Used to seed the grid search.
    fn breakpoints(&self, _beta_k: f64) -> Vec<f64> {
        Vec::new()
    }
}

/// `(alpha_minus, alpha_plus)` for `N(sqrt(2 r log p), 1)` against `N(0, 1)`.
pub fn alpha_normal(a: f64, r: f64) -> (f64, f64) {
    let s = 2.0 * (a * r).sqrt();
    (-s - r, s - r)
}

/// `(v_minus, v_plus)` for the Gaussian model:
/// `v_plus(x) = -((sqrt x - sqrt r)_+)^2`, `v_minus(x) = -(sqrt x + sqrt r)^2`.
pub fn v_funcs(x: f64, r: f64) -> (f64, f64) {
    let (sx, sr) = (x.sqrt(), r.sqrt());
    let plus = (sx - sr).max(0.0);
    (-(x + r + 2.0 * (x * r).sqrt()), -plus * plus)
}

/// Gaussian location model with signal strength `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianAlpha {
    pub r: f64,
}

impl GaussianAlpha {
    pub fn new(r: f64) -> Self {
        Self { r }
    }
}

impl AlphaFunctions for GaussianAlpha {
    fn alpha_minus(&self, a: f64) -> f64 {
        alpha_normal(a, self.r).0
    }

    fn alpha_plus(&self, a: f64) -> f64 {
        alpha_normal(a, self.r).1
    }

    fn v_minus(&self, x: f64) -> f64 {
        v_funcs(x, self.r).0
    }

    fn v_plus(&self, x: f64) -> f64 {
        v_funcs(x, self.r).1
    }

    fn breakpoints(&self, beta_k: f64) -> Vec<f64> {
        let r = self.r;
        let mut pts = vec![beta_k, r, r / 4.0];
        if r > 0.0 {
            // alpha_plus(a) = beta_k, and x - (sqrt x - sqrt r)^2 = beta_k
            pts.push((beta_k + r).powi(2) / (4.0 * r));
        }
        pts
    }
}

/// Piecewise-linear tail exponents tabulated on an increasing grid of `a`.
/// Values are held constant outside the tabulated range.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedAlpha {
    a: Vec<f64>,
    minus: Vec<f64>,
    plus: Vec<f64>,
}

impl TabulatedAlpha {
    pub fn new(a: Vec<f64>, minus: Vec<f64>, plus: Vec<f64>) -> crate::Result<Self> {
        let ok = a.len() >= 2
            && a.len() == minus.len()
            && a.len() == plus.len()
            && a.windows(2).all(|w| w[0] < w[1])
            && a.iter().chain(&minus).chain(&plus).all(|v| v.is_finite());
        if !ok {
            return Err(crate::Error::InvalidConfig(
                "tabulated alpha needs at least two finite, strictly increasing knots".into(),
            ));
        }
        Ok(Self { a, minus, plus })
    }

    fn interp(&self, values: &[f64], x: f64) -> f64 {
        let i = self.a.partition_point(|&k| k <= x);
        if i == 0 {
            return values[0];
        }
        if i == self.a.len() {
            return values[values.len() - 1];
        }
        let (x0, x1) = (self.a[i - 1], self.a[i]);
        let w = (x - x0) / (x1 - x0);
        values[i - 1] + w * (values[i] - values[i - 1])
    }

    /// `sup_{a >= x} (alpha(a) - a)`; the objective is linear between knots
    /// and decreasing past the last one, so the sup is at `x` or a knot.
    fn v(&self, values: &[f64], x: f64) -> f64 {
        let start = self.a.partition_point(|&k| k < x);
        self.a[start..]
            .iter()
            .zip(&values[start..])
            .map(|(&k, &v)| v - k)
            .fold(self.interp(values, x) - x, f64::max)
    }
}

impl AlphaFunctions for TabulatedAlpha {
    fn alpha_minus(&self, a: f64) -> f64 {
        self.interp(&self.minus, a)
    }

    fn alpha_plus(&self, a: f64) -> f64 {
        self.interp(&self.plus, a)
    }

    fn v_minus(&self, x: f64) -> f64 {
        self.v(&self.minus, x)
    }

    fn v_plus(&self, x: f64) -> f64 {
        self.v(&self.plus, x)
    }

    fn breakpoints(&self, beta_k: f64) -> Vec<f64> {
        let mut pts = self.a.clone();
        pts.push(beta_k);
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_values() {
        assert_eq!(alpha_normal(1.0, 1.0), (-3.0, 1.0));
        assert!((alpha_normal(0.25, 0.25).1 - 0.25).abs() < 1e-15);
        let (m, p) = alpha_normal(1.0, 0.0);
        assert_eq!((m + 0.0, p), (0.0, 0.0));
    }

    #[test]
    fn v_values() {
        assert_eq!(v_funcs(0.5, 1.0).1, 0.0);
        assert!((v_funcs(1.0, 0.25).1 + 0.25).abs() < 1e-15);
        assert!((v_funcs(1.0, 1.0).0 + 4.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_v_matches_supremum_of_alpha() {
        // brute-force sup over a >= x of alpha(a) - a
        for &r in &[0.0, 0.1, 0.25, 1.0, 2.5] {
            for &x in &[0.01, 0.1, 0.3, 0.5, 0.9, 1.5, 3.0] {
                let (mut sm, mut sp) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
                for i in 0..=200_000 {
                    let a = x + i as f64 * 1e-4;
                    let (am, ap) = alpha_normal(a, r);
                    sm = sm.max(am - a);
                    sp = sp.max(ap - a);
                }
                let (vm, vp) = v_funcs(x, r);
                assert!((vm - sm).abs() < 1e-9, "v- r={r} x={x}: {vm} vs {sm}");
                assert!((vp - sp).abs() < 1e-6, "v+ r={r} x={x}: {vp} vs {sp}");
            }
        }
    }

    #[test]
    fn tabulated_reproduces_gaussian_on_knots() {
        let r = 0.3;
        let a: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.002).collect();
        let minus = a.iter().map(|&x| alpha_normal(x, r).0).collect();
        let plus = a.iter().map(|&x| alpha_normal(x, r).1).collect();
        let tab = TabulatedAlpha::new(a, minus, plus).unwrap();
        let g = GaussianAlpha::new(r);
        for &x in &[0.05, 0.2, 0.5, 1.0, 2.0] {
            assert!((tab.v_plus(x) - g.v_plus(x)).abs() < 1e-4);
            assert!((tab.v_minus(x) - g.v_minus(x)).abs() < 1e-4);
            assert!((tab.alpha(x) - g.alpha(x)).abs() < 1e-3);
        }
    }

    proptest::proptest! {
        #[test]
        fn v_ordering(x in 1e-6f64..20.0, r in 0.0f64..5.0) {
            let (vm, vp) = v_funcs(x, r);
            proptest::prop_assert!(vp >= -x - 1e-12);
            proptest::prop_assert!(-x >= vm - 1e-12);
            proptest::prop_assert!(vp <= 0.0 && vm <= 0.0);
        }
    }
}
