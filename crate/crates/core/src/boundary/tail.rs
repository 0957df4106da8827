//! Finite-`p` check of the tail approximation
//! `F1(F0^-1(p^-x)) = p^(v_minus(x) + o(1))` in the Gaussian model.

use serde::{Deserialize, Serialize};

use super::alpha::v_funcs;
use crate::error::{Error, Result};
use crate::normal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    /// `log_p F1(F0^-1(p^-x))` evaluated at finite `p`.
    pub lhs_exponent: f64,
    pub v_value: f64,
}

impl TailCheck {
    pub fn gap(&self) -> f64 {
        (self.lhs_exponent - self.v_value).abs()
    }
}

pub fn tail_approx_check(x: f64, r: f64, p: u64) -> Result<TailCheck> {
    if p < 2 {
        return Err(Error::InvalidConfig(format!("p = {p} must be at least 2")));
    }
    let lnp = (p as f64).ln();
    if !(x.is_finite() && x >= std::f64::consts::LN_2 / lnp) {
        return Err(Error::InvalidConfig(format!("x = {x} must be at least log_p 2")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidConfig(format!("r = {r} must be finite and nonnegative")));
    }
    let v_value = v_funcs(x, r).0;
    let lhs_exponent = if r == 0.0 {
        -x
    } else {
        let z = normal::quantile((-x * lnp).exp());
        normal::ln_cdf(z - (2.0 * r * lnp).sqrt()) / lnp
    };
    Ok(TailCheck {
        lhs_exponent,
        v_value,
    })
}
