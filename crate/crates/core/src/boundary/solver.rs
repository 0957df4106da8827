//! Grid search with local polishing for continuous objectives on boxes,
//! optionally cut by `x1 + x2 <= cap`.
//!
//! Objectives are separable up to a cheap combining step: each axis value is
//! mapped once through `phi_k`, and the pairwise loop only combines the
//! cached per-axis terms.

/// Candidate abscissae: a uniform grid on `[lo, hi]` plus extra points.
#[derive(Debug, Clone)]
pub(crate) struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: Vec<f64>,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, res: usize, extra: &[f64]) -> Self {
        let res = res.max(2);
        let step = (hi - lo) / (res - 1) as f64;
        let mut points: Vec<f64> = (0..res).map(|i| lo + step * i as f64).collect();
        points[res - 1] = hi;
        points.extend(extra.iter().copied().filter(|x| x.is_finite() && (lo..=hi).contains(x)));
        points.sort_by(f64::total_cmp);
        points.dedup();
        Self { lo, hi, points }
    }

    pub fn step(&self, res: usize) -> f64 {
        (self.hi - self.lo) / (res.max(2) - 1) as f64
    }

    fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Maximum {
    pub value: f64,
    pub at: (f64, f64),
}

const SLACK: f64 = 1e-12;
const MIN_STEP: f64 = 1e-13;

pub(crate) fn maximize_2d<P1, P2, F1, F2, C>(
    ax1: &Axis,
    ax2: &Axis,
    cap: Option<f64>,
    initial_step: f64,
    phi1: F1,
    phi2: F2,
    combine: C,
) -> Maximum
where
    P1: Copy,
    P2: Copy,
    F1: Fn(f64) -> P1,
    F2: Fn(f64) -> P2,
    C: Fn(P1, P2) -> f64,
{
    let v1: Vec<P1> = ax1.points.iter().map(|&x| phi1(x)).collect();
    let v2: Vec<P2> = ax2.points.iter().map(|&x| phi2(x)).collect();

    let mut best = Maximum {
        value: f64::NEG_INFINITY,
        at: (f64::NAN, f64::NAN),
    };
    let mut consider = |value: f64, x1: f64, x2: f64| {
        if value > best.value {
            best = Maximum { value, at: (x1, x2) };
        }
    };

    for (i, &x1) in ax1.points.iter().enumerate() {
        let a = v1[i];
        let limit = cap.map_or(usize::MAX, |c| {
            ax2.points.partition_point(|&x2| x1 + x2 <= c + SLACK)
        });
        let mut row_best = f64::NEG_INFINITY;
        let mut row_arg = usize::MAX;
        for (j, &b) in v2.iter().enumerate().take(limit) {
            let value = combine(a, b);
            if value > row_best {
                row_best = value;
                row_arg = j;
            }
        }
        if row_arg != usize::MAX {
            consider(row_best, x1, ax2.points[row_arg]);
        }
    }

    if let Some(c) = cap {
        // the cut itself
        for (i, &x1) in ax1.points.iter().enumerate() {
            let x2 = c - x1;
            if ax2.contains(x2) {
                consider(combine(v1[i], phi2(x2)), x1, x2);
            }
        }
        for (j, &x2) in ax2.points.iter().enumerate() {
            let x1 = c - x2;
            if ax1.contains(x1) {
                consider(combine(phi1(x1), v2[j]), x1, x2);
            }
        }
    }

    if !best.value.is_finite() {
        return best;
    }
    let feasible = |x1: f64, x2: f64| {
        ax1.contains(x1) && ax2.contains(x2) && cap.is_none_or(|c| x1 + x2 <= c + SLACK)
    };
    let f = |x1: f64, x2: f64| combine(phi1(x1), phi2(x2));
    polish_2d(best, initial_step, feasible, f)
}

/// Compass search, including the two directions along `x1 + x2 = const`.
fn polish_2d(
    start: Maximum,
    initial_step: f64,
    feasible: impl Fn(f64, f64) -> bool,
    f: impl Fn(f64, f64) -> f64,
) -> Maximum {
    const DIRS: [(f64, f64); 8] = [
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (1.0, -1.0),
        (-1.0, 1.0),
        (1.0, 1.0),
        (-1.0, -1.0),
    ];
    let mut best = start;
    let mut h = initial_step;
    let mut iterations = 0;
    while h > MIN_STEP && iterations < 10_000 {
        iterations += 1;
        let (x1, x2) = best.at;
        let mut moved = false;
        for (d1, d2) in DIRS {
            let (y1, y2) = (x1 + h * d1, x2 + h * d2);
            if !feasible(y1, y2) {
                continue;
            }
            let value = f(y1, y2);
            if value > best.value {
                best = Maximum {
                    value,
                    at: (y1, y2),
                };
                moved = true;
                break;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    best
}

/// One-dimensional grid search with polishing. Returns `(value, argmax)`.
pub(crate) fn maximize_1d(axis: &Axis, initial_step: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for &x in &axis.points {
        let v = f(x);
        if v > best.0 {
            best = (v, x);
        }
    }
    let mut h = initial_step;
    while h > MIN_STEP {
        let mut moved = false;
        for d in [1.0, -1.0] {
            let y = best.1 + h * d;
            if axis.contains(y) {
                let v = f(y);
                if v > best.0 {
                    best = (v, y);
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_corner_of_cut() {
        // max of min(x1, 0.7) + min(x2, 0.7) on x1 + x2 <= 1 is 1
        let ax = Axis::new(0.0, 1.0, 37, &[]);
        let m = maximize_2d(&ax, &ax, Some(1.0), ax.step(37), |x| x.min(0.7), |x| x.min(0.7), |a, b| a + b);
        assert!((m.value - 1.0).abs() < 1e-12, "{m:?}");
    }

    #[test]
    fn polishes_interior_maximum() {
        let ax = Axis::new(0.0, 2.0, 11, &[]);
        let m = maximize_2d(
            &ax,
            &ax,
            None,
            ax.step(11),
            |x| -(x - 0.123456).powi(2),
            |x| -(x - 1.654321).powi(2),
            |a, b| a + b,
        );
        assert!(m.value > -1e-12);
        assert!((m.at.0 - 0.123456).abs() < 1e-6);
    }

    #[test]
    fn one_dimensional() {
        let ax = Axis::new(0.0, 8.0, 64, &[]);
        let (v, x) = maximize_1d(&ax, ax.step(64), |a| a.sqrt() - a);
        assert!((v - 0.25).abs() < 1e-12);
        assert!((x - 0.25).abs() < 1e-5);
    }
}
