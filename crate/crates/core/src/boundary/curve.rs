//! Boundary curves over grids of `(beta1, beta2, r1, r2)`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::regions::{boundary_beta, SolverOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub beta1: f64,
    pub beta2: f64,
    pub r1: f64,
    pub r2: f64,
    pub beta_star: f64,
}

/// `beta*` at each `(beta1, beta2, r1, r2)`, in input order.
pub fn boundary_curve(grid: &[(f64, f64, f64, f64)], opts: &SolverOptions, tol: f64) -> Result<Vec<BoundaryPoint>> {
    grid.par_iter()
        .map(|&(beta1, beta2, r1, r2)| {
            Ok(BoundaryPoint {
                beta1,
                beta2,
                r1,
                r2,
                beta_star: boundary_beta(beta1, beta2, r1, r2, opts, tol)?,
            })
        })
        .collect()
}

/// Writes a leading `#` comment with the solver settings, then
/// `beta1,beta2,r1,r2,beta_star` rows.
pub fn write_boundary_csv<W: Write>(out: W, points: &[BoundaryPoint], opts: &SolverOptions, tol: f64) -> Result<()> {
    let mut out = out;
    writeln!(out, "# res={} a_res={} tol={} solver_tol={}", opts.res, opts.a_res, tol, opts.tol)?;
    let mut w = csv::Writer::from_writer(out);
    for pt in points {
        w.serialize(pt).map_err(|e| Error::Io(e.to_string()))?;
    }
    Ok(w.flush()?)
}
