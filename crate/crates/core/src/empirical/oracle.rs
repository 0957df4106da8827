//! Statistic with known marginal survival functions.
//!
//! The empirical joint survival `S12(t1, t2)` is a step function, constant on
//! the rectangles `(a1, b1] x (a2, b2]` between consecutive data values. On
//! such a rectangle the ratio is quasi-convex in `S1 S2`, which is
//! nonincreasing in both thresholds, so its supremum sits at the corner
//! `(b1, b2)` or in the limit at `(a1+, a2+)`. Both corner sets are
//! evaluated: every pair of data values, and every pair of right limits
//! just above data values. The unbounded regions below the smallest
//! observations are not evaluated separately.

use super::grid::DetectionResult;
use super::pairs::{PairedStatistics, TruncationConfig};
use crate::error::{Error, Result, Sequence};

/// Supremum of `sqrt(p) |S12_hat - S1 S2| / sqrt(S1 S2 - S1^2 S2^2)` with the
/// true marginals `s1`, `s2`.
///
/// `argmax_cell` holds 1-based positions among the ascending distinct data
/// values; when the maximum sits at a right limit, `argmax_thresholds` holds
/// the next representable value above the data point.
pub fn dstat_oracle<F, G>(pairs: &PairedStatistics, s1: F, s2: G) -> Result<DetectionResult>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let p = pairs.len();
    let d1 = distinct(pairs.t1());
    let d2 = distinct(pairs.t2());

    let at1 = evaluate(&s1, &d1, Sequence::First, false)?;
    let at2 = evaluate(&s2, &d2, Sequence::Second, false)?;
    let above1 = evaluate(&s1, &d1, Sequence::First, true)?;
    let above2 = evaluate(&s2, &d2, Sequence::Second, true)?;

    // joint[a][b] = #{T1 >= d1[a], T2 >= d2[b]}, with a trailing zero row/column
    // so that index a + 1 gives the count strictly above d1[a].
    let n1 = d1.len();
    let n2 = d2.len();
    let mut joint = vec![0u32; (n1 + 1) * (n2 + 1)];
    let idx = |a: usize, b: usize| a * (n2 + 1) + b;
    for (&x, &y) in pairs.t1().iter().zip(pairs.t2()) {
        let a = d1.partition_point(|&v| v < x);
        let b = d2.partition_point(|&v| v < y);
        joint[idx(a, b)] += 1;
    }
    for a in (0..n1).rev() {
        for b in (0..n2).rev() {
            joint[idx(a, b)] += joint[idx(a + 1, b)] + joint[idx(a, b + 1)] - joint[idx(a + 1, b + 1)];
        }
    }

    let pf = p as f64;
    let mut best: Option<(f64, usize, usize, bool)> = None;
    let mut cells = 0u64;
    let mut consider = |value: f64, a: usize, b: usize, limit: bool| {
        let better = match best {
            None => true,
            Some((v, ..)) => value > v,
        };
        if better {
            best = Some((value, a, b, limit));
        }
    };
    for a in 0..n1 {
        for b in 0..n2 {
            for (limit, u1, u2, c12) in [
                (false, at1[a], at2[b], joint[idx(a, b)]),
                (true, above1[a], above2[b], joint[idx(a + 1, b + 1)]),
            ] {
                let u = u1 * u2;
                if u <= 0.0 || u >= 1.0 {
                    continue;
                }
                cells += 1;
                let value = pf.sqrt() * (c12 as f64 / pf - u).abs() / (u - u * u).sqrt();
                consider(value, a, b, limit);
            }
        }
    }

    let (statistic, a, b, limit) = best.ok_or_else(|| {
        Error::DegenerateInput("marginal survival products are all 0 or 1".into())
    })?;
    let thresholds = if limit {
        (d1[a].next_up(), d2[b].next_up())
    } else {
        (d1[a], d2[b])
    };
    Ok(DetectionResult {
        statistic,
        argmax_cell: (a + 1, b + 1),
        argmax_thresholds: thresholds,
        truncation: TruncationConfig::full(p),
        cells_evaluated: cells,
    })
}

fn distinct(values: &[f64]) -> Vec<f64> {
    let mut d = values.to_vec();
    d.sort_by(f64::total_cmp);
    d.dedup();
    d
}

fn evaluate<F: Fn(f64) -> f64>(
    s: &F,
    points: &[f64],
    sequence: Sequence,
    right_limit: bool,
) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|&x| {
            let at = if right_limit { x.next_up() } else { x };
            let value = s(at);
            if (0.0..=1.0).contains(&value) {
                Ok(value)
            } else {
                Err(Error::InvalidSurvival {
                    sequence,
                    at,
                    value,
                })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_survival(x: f64) -> f64 {
        (1.0 - x).clamp(0.0, 1.0)
    }

    #[test]
    fn single_point_at_center() {
        let pairs = PairedStatistics::new(vec![0.5], vec![0.5]).unwrap();
        let res = dstat_oracle(&pairs, uniform_survival, uniform_survival).unwrap();
        assert!((res.statistic - 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(res.argmax_thresholds, (0.5, 0.5));
    }

    #[test]
    fn single_point_near_corner() {
        let pairs = PairedStatistics::new(vec![0.9], vec![0.9]).unwrap();
        let res = dstat_oracle(&pairs, uniform_survival, uniform_survival).unwrap();
        // floating error in 1 - 0.9
        assert!((res.statistic - 99f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn rejects_out_of_range_survival() {
        let pairs = PairedStatistics::new(vec![0.2, 0.4], vec![0.1, 0.3]).unwrap();
        let err = dstat_oracle(&pairs, |_| 1.5, uniform_survival).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidSurvival {
                sequence: Sequence::First,
                ..
            }
        ));
        let err = dstat_oracle(&pairs, uniform_survival, |_| f64::NAN).unwrap_err();
        assert!(matches!(err, Error::InvalidSurvival { .. }));
    }

    #[test]
    fn agrees_with_brute_force_on_small_sample() {
        let t1 = vec![0.12, 0.55, 0.31, 0.93, 0.47, 0.05];
        let t2 = vec![0.71, 0.28, 0.66, 0.88, 0.13, 0.40];
        let pairs = PairedStatistics::new(t1.clone(), t2.clone()).unwrap();
        let res = dstat_oracle(&pairs, uniform_survival, uniform_survival).unwrap();

        let p = t1.len() as f64;
        let mut best = 0.0f64;
        for &x in &t1 {
            for &y in &t2 {
                for (a, b) in [(x, y), (x.next_up(), y.next_up())] {
                    let c12 = t1.iter().zip(&t2).filter(|&(&u, &v)| u >= a && v >= b).count();
                    let s = uniform_survival(a) * uniform_survival(b);
                    if s > 0.0 && s < 1.0 {
                        let v = p.sqrt() * (c12 as f64 / p - s).abs() / (s - s * s).sqrt();
                        best = best.max(v);
                    }
                }
            }
        }
        assert_eq!(res.statistic, best);
    }
}
