//! Detectable and undetectable regions of the calibrated two-sequence model.
//!
//! With `pi_k = p^-beta_k` and `eps = pi_1 pi_2 + p^-beta`, the adaptive test
//! succeeds when one of four suprema `Q1..Q4` over exponents `(x1, x2)` is
//! positive, and every test fails when the three expressions `U1_1`, `U1_2`
//! and `U2` over likelihood-ratio exponents `(a1, a2)` are all negative.
//! Essential suprema are replaced by suprema over dense grids, refined by a
//! local search; every objective here is continuous.

use serde::{Deserialize, Serialize};

use super::alpha::{AlphaFunctions, GaussianAlpha};
use super::solver::{maximize_1d, maximize_2d, Axis};
use crate::error::{Error, Result};

/// Calibration exponents and Gaussian signal strengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationParams {
    /// Number of features; only used to convert exponents into counts.
    pub p: usize,
    pub beta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub r1: f64,
    pub r2: f64,
}

impl CalibrationParams {
    pub fn new(p: usize, beta: f64, beta1: f64, beta2: f64, r1: f64, r2: f64) -> Result<Self> {
        let c = Self {
            p,
            beta,
            beta1,
            beta2,
            r1,
            r2,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::InvalidCalibration(format!("p = {} must be at least 2", self.p)));
        }
        validate_sparsity(self.beta1, self.beta2)?;
        if !(self.beta > 0.5 && self.beta < 1.0) {
            return Err(Error::InvalidCalibration(format!(
                "beta = {} must lie in (1/2, 1)",
                self.beta
            )));
        }
        if self.beta1.max(self.beta2) > self.beta {
            return Err(Error::InvalidCalibration(format!(
                "max(beta1, beta2) = {} exceeds beta = {}",
                self.beta1.max(self.beta2),
                self.beta
            )));
        }
        validate_strength(self.r1, self.r2)
    }

    pub fn pi1(&self) -> f64 {
        (self.p as f64).powf(-self.beta1)
    }

    pub fn pi2(&self) -> f64 {
        (self.p as f64).powf(-self.beta2)
    }

    /// `P(I1 = 1, I2 = 1) = pi1 pi2 + p^-beta`.
    pub fn epsilon(&self) -> f64 {
        self.pi1() * self.pi2() + (self.p as f64).powf(-self.beta)
    }
}

pub(crate) fn validate_sparsity(beta1: f64, beta2: f64) -> Result<()> {
    for (name, b) in [("beta1", beta1), ("beta2", beta2)] {
        if !(0.5..=1.0).contains(&b) {
            return Err(Error::InvalidCalibration(format!("{name} = {b} must lie in [1/2, 1]")));
        }
    }
    Ok(())
}

pub(crate) fn validate_strength(r1: f64, r2: f64) -> Result<()> {
    for (name, r) in [("r1", r1), ("r2", r2)] {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidCalibration(format!("{name} = {r} must be a finite nonnegative number")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Grid points per axis for `Q1..Q4`.
    pub res: usize,
    /// Grid points per axis for the `a` searches.
    pub a_res: usize,
    /// Upper end of the unbounded `x` ranges.
    pub x_max: f64,
    pub a_min: f64,
    pub a_max: f64,
    /// Sign threshold for verdicts.
    pub tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            res: 512,
            a_res: 2048,
            x_max: 8.0,
            a_min: 1e-4,
            a_max: 8.0,
            tol: 1e-9,
        }
    }
}

impl SolverOptions {
    pub fn with_res(res: usize) -> Self {
        Self {
            res,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectableRegion {
    pub q_values: [f64; 4],
    pub detectable: bool,
    pub grid_resolution: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UndetectableRegion {
    pub u1_values: [f64; 2],
    pub u2_value: f64,
    pub undetectable: bool,
    pub grid_resolution: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub q_values: [f64; 4],
    pub detectable: bool,
    pub u1_values: [f64; 2],
    pub u2_value: f64,
    pub undetectable: bool,
    pub grid_resolution: usize,
    pub a_grid_resolution: usize,
    pub tol: f64,
}

/// Exponents of one model: the common `beta` plus per-sequence tails.
pub struct RegionProblem<'a> {
    pub beta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub first: &'a dyn AlphaFunctions,
    pub second: &'a dyn AlphaFunctions,
}

impl RegionProblem<'_> {
    fn x_breakpoints(&self) -> (Vec<f64>, Vec<f64>) {
        let b1 = self.first.breakpoints(self.beta1);
        let b2 = self.second.breakpoints(self.beta2);
        // images of the other axis' kinks under the x1 + x2 = 1 cut
        let mut e1 = b1.clone();
        e1.extend(b2.iter().map(|x| 1.0 - x));
        let mut e2 = b2.clone();
        e2.extend(b1.iter().map(|x| 1.0 - x));
        (e1, e2)
    }

    /// `(-x) v v+(x) + (x ^ (beta_k - v+(x))) / 2`.
    fn plus_term(alpha: &dyn AlphaFunctions, beta_k: f64, x: f64) -> f64 {
        let vp = alpha.v_plus(x);
        (-x).max(vp) + x.min(beta_k - vp) / 2.0
    }

    fn minus_term(alpha: &dyn AlphaFunctions, x: f64) -> f64 {
        (-x).max(alpha.v_minus(x))
    }

    pub fn q1(&self, opts: &SolverOptions) -> f64 {
        let (e1, e2) = self.x_breakpoints();
        let ax1 = Axis::new(0.0, 1.0, opts.res, &e1);
        let ax2 = Axis::new(0.0, 1.0, opts.res, &e2);
        let base = 0.5 - self.beta;
        maximize_2d(
            &ax1,
            &ax2,
            Some(1.0),
            ax1.step(opts.res),
            |x| Self::plus_term(self.first, self.beta1, x),
            |x| Self::plus_term(self.second, self.beta2, x),
            |a, b| base + a + b,
        )
        .value
    }

    pub fn q2(&self, opts: &SolverOptions) -> f64 {
        let (e1, e2) = self.x_breakpoints();
        let ax1 = Axis::new(0.0, opts.x_max, opts.res, &e1);
        let ax2 = Axis::new(0.0, 1.0, opts.res, &e2);
        let base = 0.5 - self.beta;
        maximize_2d(
            &ax1,
            &ax2,
            None,
            ax2.step(opts.res),
            |x| Self::minus_term(self.first, x),
            |x| Self::plus_term(self.second, self.beta2, x),
            |a, b| base + a + b,
        )
        .value
    }

    pub fn q3(&self, opts: &SolverOptions) -> f64 {
        let (e1, e2) = self.x_breakpoints();
        let ax1 = Axis::new(0.0, 1.0, opts.res, &e1);
        let ax2 = Axis::new(0.0, opts.x_max, opts.res, &e2);
        let base = 0.5 - self.beta;
        maximize_2d(
            &ax1,
            &ax2,
            None,
            ax1.step(opts.res),
            |x| Self::plus_term(self.first, self.beta1, x),
            |x| Self::minus_term(self.second, x),
            |a, b| base + a + b,
        )
        .value
    }

    pub fn q4(&self, opts: &SolverOptions) -> f64 {
        let (e1, e2) = self.x_breakpoints();
        let ax1 = Axis::new(0.0, opts.x_max, opts.res, &e1);
        let ax2 = Axis::new(0.0, opts.x_max, opts.res, &e2);
        let base = 0.5 - self.beta;
        let (b1, b2) = (self.beta1, self.beta2);
        maximize_2d(
            &ax1,
            &ax2,
            None,
            ax1.step(opts.res),
            |x| (Self::minus_term(self.first, x), x.min(b1)),
            |x| (Self::minus_term(self.second, x), x.min(b2)),
            |(h1, m1), (h2, m2)| base + h1 + h2 + m1.min(m2) / 2.0,
        )
        .value
    }

    pub fn detectable(&self, opts: &SolverOptions) -> DetectableRegion {
        let q_values = [self.q1(opts), self.q2(opts), self.q3(opts), self.q4(opts)];
        DetectableRegion {
            q_values,
            detectable: q_values.iter().any(|&q| q > opts.tol),
            grid_resolution: opts.res,
            tol: opts.tol,
        }
    }

    fn a_axis(&self, alpha: &dyn AlphaFunctions, beta_k: f64, opts: &SolverOptions) -> Axis {
        Axis::new(opts.a_min, opts.a_max, opts.a_res, &alpha.breakpoints(beta_k))
    }

    /// `1 - 2 beta + sup_a {alpha_k(a) + alpha_k(a) ^ beta_k - a}`.
    pub fn u1(&self, k: usize, opts: &SolverOptions) -> f64 {
        let (alpha, beta_k) = match k {
            1 => (self.first, self.beta1),
            _ => (self.second, self.beta2),
        };
        let axis = self.a_axis(alpha, beta_k, opts);
        let (sup, _) = maximize_1d(&axis, axis.step(opts.a_res), |a| {
            let al = alpha.alpha(a);
            al + al.min(beta_k) - a
        });
        1.0 - 2.0 * self.beta + sup
    }

    /// `1 + sup_{a1,a2} [{-beta + A} ^ {-2 beta + A + alpha_1 ^ beta_1 + alpha_2 ^ beta_2} - a1 - a2]`
    /// with `A = alpha_1(a1) + alpha_2(a2)`.
    pub fn u2(&self, opts: &SolverOptions) -> f64 {
        let ax1 = self.a_axis(self.first, self.beta1, opts);
        let ax2 = self.a_axis(self.second, self.beta2, opts);
        let beta = self.beta;
        fn phi(alpha: &dyn AlphaFunctions, beta_k: f64) -> impl Fn(f64) -> (f64, f64) + '_ {
            move |a| {
                let al = alpha.alpha(a);
                (al - a, al.min(beta_k))
            }
        }
        let sup = maximize_2d(
            &ax1,
            &ax2,
            None,
            ax1.step(opts.a_res),
            phi(self.first, self.beta1),
            phi(self.second, self.beta2),
            |(e1, m1), (e2, m2)| e1 + e2 - beta + (m1 + m2 - beta).min(0.0),
        )
        .value;
        1.0 + sup
    }

    pub fn undetectable(&self, opts: &SolverOptions) -> UndetectableRegion {
        let u1_values = [self.u1(1, opts), self.u1(2, opts)];
        let u2_value = self.u2(opts);
        UndetectableRegion {
            u1_values,
            u2_value,
            undetectable: [u1_values[0], u1_values[1], u2_value].iter().all(|&u| u < -opts.tol),
            grid_resolution: opts.a_res,
            tol: opts.tol,
        }
    }
}

fn gaussian_problem<'a>(c: &CalibrationParams, g1: &'a GaussianAlpha, g2: &'a GaussianAlpha) -> RegionProblem<'a> {
    RegionProblem {
        beta: c.beta,
        beta1: c.beta1,
        beta2: c.beta2,
        first: g1,
        second: g2,
    }
}

/// Sufficient conditions for the adaptive test to succeed, Gaussian model.
pub fn detectable_region_check(calib: &CalibrationParams, opts: &SolverOptions) -> Result<DetectableRegion> {
    calib.validate()?;
    let (g1, g2) = (GaussianAlpha::new(calib.r1), GaussianAlpha::new(calib.r2));
    Ok(gaussian_problem(calib, &g1, &g2).detectable(opts))
}

/// Sufficient conditions for every test to fail, Gaussian model.
pub fn undetectable_region_check(calib: &CalibrationParams, opts: &SolverOptions) -> Result<UndetectableRegion> {
    calib.validate()?;
    let (g1, g2) = (GaussianAlpha::new(calib.r1), GaussianAlpha::new(calib.r2));
    Ok(gaussian_problem(calib, &g1, &g2).undetectable(opts))
}

/// Both checks.
pub fn region_check(calib: &CalibrationParams, opts: &SolverOptions) -> Result<RegionVerdict> {
    let d = detectable_region_check(calib, opts)?;
    let u = undetectable_region_check(calib, opts)?;
    Ok(RegionVerdict {
        q_values: d.q_values,
        detectable: d.detectable,
        u1_values: u.u1_values,
        u2_value: u.u2_value,
        undetectable: u.undetectable,
        grid_resolution: opts.res,
        a_grid_resolution: opts.a_res,
        tol: opts.tol,
    })
}

/// Dependence exponent on the detection boundary of the Gaussian model.
///
/// Bisects on `beta` over `(1/2, 1]` for the sign change of `Q1`, which
/// decides detectability under stochastic ordering. Returns 1 when `Q1`
/// stays nonnegative up to `beta = 1`, and 1/2 when it is nonpositive
/// already at `beta = 1/2`. The `beta >= max(beta1, beta2)` constraint is
/// not imposed on the curve.
pub fn boundary_beta(beta1: f64, beta2: f64, r1: f64, r2: f64, opts: &SolverOptions, tol: f64) -> Result<f64> {
    validate_sparsity(beta1, beta2)?;
    validate_strength(r1, r2)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("bisection tolerance {tol} must be positive")));
    }
    let (g1, g2) = (GaussianAlpha::new(r1), GaussianAlpha::new(r2));
    let q1 = |beta: f64| {
        RegionProblem {
            beta,
            beta1,
            beta2,
            first: &g1,
            second: &g2,
        }
        .q1(opts)
    };
    if q1(1.0) >= -opts.tol {
        return Ok(1.0);
    }
    if q1(0.5) <= opts.tol {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.5, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if q1(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Detection boundary `r*(beta)` for a single sparse normal mixture.
pub fn single_seq_boundary(beta: f64) -> Result<f64> {
    if !(beta > 0.5 && beta < 1.0) {
        return Err(Error::InvalidCalibration(format!("beta = {beta} must lie in (1/2, 1)")));
    }
    Ok(if beta <= 0.75 {
        beta - 0.5
    } else {
        (1.0 - (1.0 - beta).sqrt()).powi(2)
    })
}
