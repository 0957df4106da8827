//! Grid evaluation of the standardized 2x2-table discrepancy
//!
//! For thresholds `(t1, t2)` taken from the distinct order statistics, with
//! `c1 = #{T1 >= t1}`, `c2 = #{T2 >= t2}` and `c12 = #{T1 >= t1, T2 >= t2}`,
//!
//! ```text
//! D(t1, t2) = sqrt(p) |p c12 - c1 c2| / sqrt(c1 c2 (p^2 - c1 c2))
//! ```
//!
//! which is the survival-function form `sqrt(p) |S12 - S1 S2| / sqrt(S1 S2 - S1^2 S2^2)`
//! multiplied through by `p^2`. The cell with `c1 c2 = p^2` is skipped.
//!
//! Cells are addressed by `(l, m)`, the 1-based positions of the thresholds
//! among the ascending distinct values of each sequence. Only the top `m1`
//! and `m2` distinct values are visited. Among cells with equal values the
//! one with the smallest `l`, then the smallest `m`, is reported.

use serde::{Deserialize, Serialize};

use super::pairs::{RankedPairs, TruncationConfig};
use crate::error::{Error, Result};

/// Outcome of a maximization over threshold pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub statistic: f64,
    /// 1-based `(l, m)` into the ascending distinct values of `t1` and `t2`.
    pub argmax_cell: (usize, usize),
    pub argmax_thresholds: (f64, f64),
    pub truncation: TruncationConfig,
    pub cells_evaluated: u64,
}

/// Squared statistic divided by `p`; monotone in the statistic.
#[inline(always)]
fn cell_key(p: f64, pp: f64, c1: f64, c2: f64, c12: f64) -> f64 {
    let u = c1 * c2;
    let num = p * c12 - u;
    num * num / (u * (pp - u))
}

#[inline]
fn key_to_statistic(p: f64, key: f64) -> f64 {
    (p * key).sqrt()
}

/// `D` for explicit counts, or `None` for the excluded `c1 c2 = p^2` cell.
pub fn statistic_from_counts(p: usize, c1: usize, c2: usize, c12: usize) -> Option<f64> {
    let pf = p as f64;
    let pp = pf * pf;
    let (c1, c2) = (c1 as f64, c2 as f64);
    if c1 * c2 >= pp {
        return None;
    }
    Some(key_to_statistic(pf, cell_key(pf, pp, c1, c2, c12 as f64)))
}

#[derive(Debug, Clone, Copy)]
struct Best {
    key: f64,
    l: usize,
    m: usize,
}

impl Best {
    fn empty() -> Self {
        Self {
            key: f64::NEG_INFINITY,
            l: usize::MAX,
            m: usize::MAX,
        }
    }

    #[inline(always)]
    fn offer(&mut self, key: f64, l: usize, m: usize) {
        if key > self.key || (key == self.key && (l, m) < (self.l, self.m)) {
            *self = Best { key, l, m };
        }
    }
}

/// Truncated grid geometry shared by the naive and fast evaluators.
///
/// Row `r` is the `r`-th largest distinct `t1` value (`l = d1 - r`), column
/// `c` the `c`-th largest distinct `t2` value (`m = d2 - c`).
pub(crate) struct Grid<'a> {
    ranked: &'a RankedPairs,
    trunc: TruncationConfig,
    p: f64,
    pp: f64,
    d1: usize,
    d2: usize,
    k1: usize,
    k2: usize,
    row_c1: Vec<f64>,
    col_c2: Vec<f64>,
}

impl<'a> Grid<'a> {
    pub(crate) fn new(ranked: &'a RankedPairs, trunc: TruncationConfig) -> Result<Self> {
        let p = ranked.len();
        trunc.validate(p)?;
        let d1 = ranked.first().distinct_len();
        let d2 = ranked.second().distinct_len();
        if d1 < 2 || d2 < 2 {
            return Err(Error::DegenerateInput(
                "every value in one of the sequences is identical".into(),
            ));
        }
        let k1 = trunc.m1.min(d1);
        let k2 = trunc.m2.min(d2);
        let s1 = &ranked.first().survival;
        let s2 = &ranked.second().survival;
        let row_c1 = (0..k1).map(|r| s1[d1 - 1 - r] as f64).collect();
        let col_c2 = (0..k2).map(|c| s2[d2 - 1 - c] as f64).collect();
        let pf = p as f64;
        Ok(Self {
            ranked,
            trunc,
            p: pf,
            pp: pf * pf,
            d1,
            d2,
            k1,
            k2,
            row_c1,
            col_c2,
        })
    }

    /// Admissible cells in the truncated grid. Only the cell pairing the two
    /// smallest values can have `c1 c2 = p^2`.
    pub(crate) fn cells_evaluated(&self) -> u64 {
        let excluded = self.k1 == self.d1 && self.k2 == self.d2;
        (self.k1 * self.k2) as u64 - u64::from(excluded)
    }

    fn result(&self, best: Best) -> Result<DetectionResult> {
        if best.l == usize::MAX {
            return Err(Error::DegenerateInput("no admissible grid cell".into()));
        }
        Ok(DetectionResult {
            statistic: key_to_statistic(self.p, best.key),
            argmax_cell: (best.l, best.m),
            argmax_thresholds: (
                self.ranked.distinct1()[best.l - 1],
                self.ranked.distinct2()[best.m - 1],
            ),
            truncation: self.trunc,
            cells_evaluated: self.cells_evaluated(),
        })
    }

    #[inline(always)]
    fn offer(&self, best: &mut Best, r: usize, c: usize, c12: f64) {
        let c1 = self.row_c1[r];
        let c2 = self.col_c2[c];
        if c1 * c2 >= self.pp {
            return;
        }
        best.offer(
            cell_key(self.p, self.pp, c1, c2, c12),
            self.d1 - r,
            self.d2 - c,
        );
    }

    /// Counts every cell directly. O(p m1 m2).
    pub(crate) fn naive(&self) -> Result<DetectionResult> {
        let level1 = &self.ranked.first().level;
        let level2 = &self.ranked.second().level;
        let mut best = Best::empty();
        for r in 0..self.k1 {
            let min1 = (self.d1 - 1 - r) as u32;
            for c in 0..self.k2 {
                let min2 = (self.d2 - 1 - c) as u32;
                let c12 = level1
                    .iter()
                    .zip(level2)
                    .filter(|&(&a, &b)| a >= min1 && b >= min2)
                    .count();
                self.offer(&mut best, r, c, c12 as f64);
            }
        }
        self.result(best)
    }

    /// Number of positions whose `t2` value lies in the truncated region.
    pub(crate) fn region2_len(&self) -> usize {
        self.col_c2[self.k2 - 1] as usize
    }

    /// Argmax over the grid for the pairing `t2[j]` with the `t1` level
    /// `level1_at(j)`; a permuted lookup evaluates a permuted sample without
    /// re-sorting.
    pub(crate) fn fast_with(&self, level1_at: impl Fn(usize) -> u32) -> Result<DetectionResult> {
        let level2 = &self.ranked.second().level;
        let low2 = (self.d2 - self.k2) as u32;
        let points = level2
            .iter()
            .enumerate()
            .filter(|&(_, &b)| b >= low2)
            .map(|(j, &b)| (level1_at(j), b));
        self.fast_points(points)
    }

    /// Argmax over the grid for explicit `(t1 level, t2 level)` points.
    /// Every point with its `t2` level in the truncated region must be
    /// present; points outside it are ignored.
    pub(crate) fn fast_points(&self, points: impl IntoIterator<Item = (u32, u32)>) -> Result<DetectionResult> {
        let mut best = Best::empty();
        self.sweep(points, self.k2, |r, occ, col_count, _| {
            if let Some(occ) = occ {
                self.scan_runs(r, occ, col_count, |r, c, c12| {
                    self.offer(&mut best, r, c, c12);
                    false
                });
            } else {
                let mut joint = 0u32;
                for (c, &n) in col_count.iter().enumerate() {
                    joint += n;
                    self.offer(&mut best, r, c, joint as f64);
                }
            }
            false
        });
        self.result(best)
    }

    /// Whether some cell reaches `statistic >= threshold`. Agrees exactly with
    /// comparing the [`Grid::fast_points`] statistic to `threshold`, but stops
    /// at the first such cell and skips column blocks whose upper bound falls
    /// short.
    pub(crate) fn exceeds(&self, points: impl IntoIterator<Item = (u32, u32)>, threshold: f64) -> bool {
        // keys below this cannot round up to the threshold
        let key_lo = threshold * threshold / self.p * (1.0 - 1e-9);
        let hit = |r: usize, c: usize, c12: f64| {
            let (c1, c2) = (self.row_c1[r], self.col_c2[c]);
            if c1 * c2 >= self.pp {
                return false;
            }
            let key = cell_key(self.p, self.pp, c1, c2, c12);
            key >= key_lo && key_to_statistic(self.p, key) >= threshold
        };
        self.sweep(points, self.k2.div_ceil(BLOCK), |r, occ, col_count, blk_count| {
            if let Some(occ) = occ {
                return self.scan_runs(r, occ, col_count, hit);
            }
            let c1 = self.row_c1[r];
            let mut before = 0u32;
            for (blk, &n) in blk_count.iter().enumerate() {
                let lo = blk * BLOCK;
                let hi = (lo + BLOCK).min(self.k2) - 1;
                let after = before + n;
                let (u_lo, u_hi) = (c1 * self.col_c2[lo], c1 * self.col_c2[hi]);
                let skip = u_hi < self.pp && {
                    let num = (self.p * after as f64 - u_lo).max(u_hi - self.p * before as f64);
                    let den = (u_lo * (self.pp - u_lo)).min(u_hi * (self.pp - u_hi));
                    num * num < key_lo * den * (1.0 - 1e-9)
                };
                if !skip {
                    let mut joint = before;
                    for c in lo..=hi {
                        joint += col_count[c];
                        if hit(r, c, joint as f64) {
                            return true;
                        }
                    }
                }
                before = after;
            }
            false
        })
    }

    /// Inserts points row by row from the largest `t1` value down and calls
    /// `row(r, occupied, col_count, blk_count)` after each row; stops early
    /// when it returns true. `occupied` lists the sorted nonempty columns
    /// while `2 |occupied| + 2 < sparse_limit`, and is `None` from then on.
    fn sweep(
        &self,
        points: impl IntoIterator<Item = (u32, u32)>,
        sparse_limit: usize,
        mut row: impl FnMut(usize, Option<&[u32]>, &[u32], &[u32]) -> bool,
    ) -> bool {
        let low1 = (self.d1 - self.k1) as u32;
        let low2 = (self.d2 - self.k2) as u32;
        let top1 = (self.d1 - 1) as u32;
        let top2 = (self.d2 - 1) as u32;

        // Points inside the truncated region, bucketed by row.
        let inside: Vec<(u32, u32)> = points
            .into_iter()
            .filter(|&(a, b)| a >= low1 && b >= low2)
            .map(|(a, b)| (top1 - a, top2 - b))
            .collect();
        let mut row_start = vec![0u32; self.k1 + 1];
        for &(r, _) in &inside {
            row_start[r as usize + 1] += 1;
        }
        for r in 0..self.k1 {
            row_start[r + 1] += row_start[r];
        }
        let mut cursor = row_start.clone();
        let mut row_cols = vec![0u32; inside.len()];
        for &(r, c) in &inside {
            row_cols[cursor[r as usize] as usize] = c;
            cursor[r as usize] += 1;
        }
        drop(inside);

        let mut col_count = vec![0u32; self.k2];
        let mut blk_count = vec![0u32; self.k2.div_ceil(BLOCK)];
        // Sorted distinct occupied columns.
        let mut occupied: Vec<u32> = Vec::new();
        let mut sparse = true;
        for r in 0..self.k1 {
            let cols = &row_cols[row_start[r] as usize..row_start[r + 1] as usize];
            for &c in cols {
                if sparse && col_count[c as usize] == 0 {
                    let at = occupied.partition_point(|&x| x < c);
                    occupied.insert(at, c);
                }
                col_count[c as usize] += 1;
                blk_count[c as usize / BLOCK] += 1;
            }
            sparse = sparse && 2 * occupied.len() + 2 < sparse_limit;
            if row(r, sparse.then_some(&occupied[..]), &col_count, &blk_count) {
                return true;
            }
        }
        false
    }

    /// Within a run of columns sharing the same joint count the value is
    /// quasi-convex in `c1 c2`, so only the two ends of each run can hold
    /// the maximum. Stops when `f` returns true.
    fn scan_runs(
        &self,
        r: usize,
        occupied: &[u32],
        col_count: &[u32],
        mut f: impl FnMut(usize, usize, f64) -> bool,
    ) -> bool {
        let mut run = |first: usize, last: usize, joint: u32| {
            let c12 = joint as f64;
            if f(r, first, c12) {
                return true;
            }
            if last > first {
                // The excluded corner can only be the last column of the last row.
                if self.row_c1[r] * self.col_c2[last] >= self.pp {
                    return last - 1 > first && f(r, last - 1, c12);
                }
                return f(r, last, c12);
            }
            false
        };
        let mut joint = 0u32;
        let mut start = 0usize;
        for (i, &c) in occupied.iter().enumerate() {
            let c = c as usize;
            if c > start && run(start, c - 1, joint) {
                return true;
            }
            joint += col_count[c];
            let end = occupied.get(i + 1).map_or(self.k2, |&x| x as usize);
            if run(c, end - 1, joint) {
                return true;
            }
            start = end;
        }
        start < self.k2 && run(start, self.k2 - 1, joint)
    }
}

const BLOCK: usize = 32;

/// Reference evaluation visiting every cell of the truncated grid.
pub fn dstat_naive(ranked: &RankedPairs, trunc: TruncationConfig) -> Result<DetectionResult> {
    Grid::new(ranked, trunc)?.naive()
}

/// Fast evaluation; returns exactly what [`dstat_naive`] returns.
pub fn dstat_fast(ranked: &RankedPairs, trunc: TruncationConfig) -> Result<DetectionResult> {
    let level1 = &ranked.first().level;
    Grid::new(ranked, trunc)?.fast_with(|j| level1[j])
}

/// Recomputes `D_lm` at one cell by direct counting.
pub fn cell_statistic(ranked: &RankedPairs, l: usize, m: usize) -> Option<f64> {
    let t1 = *ranked.distinct1().get(l.checked_sub(1)?)?;
    let t2 = *ranked.distinct2().get(m.checked_sub(1)?)?;
    let src = ranked.source();
    let c12 = src
        .t1()
        .iter()
        .zip(src.t2())
        .filter(|&(&a, &b)| a >= t1 && b >= t2)
        .count();
    statistic_from_counts(
        ranked.len(),
        ranked.survival_count1(t1),
        ranked.survival_count2(t2),
        c12,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirical::pairs::{preprocess, PairedStatistics};

    fn ranked(t1: &[f64], t2: &[f64]) -> RankedPairs {
        preprocess(&PairedStatistics::new(t1.to_vec(), t2.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn two_point_concordant() {
        let r = ranked(&[1.0, 2.0], &[1.0, 2.0]);
        let res = dstat_naive(&r, TruncationConfig::full(2)).unwrap();
        assert!((res.statistic - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(res.argmax_thresholds, (2.0, 2.0));
        assert_eq!(res.cells_evaluated, 3);
        assert_eq!(dstat_fast(&r, TruncationConfig::full(2)).unwrap(), res);
    }

    #[test]
    fn two_point_anticoncordant_is_symmetric() {
        let r = ranked(&[1.0, 2.0], &[2.0, 1.0]);
        let res = dstat_fast(&r, TruncationConfig::full(2)).unwrap();
        assert!((res.statistic - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn four_identical_ranks() {
        let t = [1.0, 2.0, 3.0, 4.0];
        let r = ranked(&t, &t);
        let expected = 6.0 / 15f64.sqrt();
        let res = dstat_naive(&r, TruncationConfig::full(4)).unwrap();
        assert!((res.statistic - expected).abs() < 1e-12);
        assert_eq!(res.argmax_cell, (4, 4));
        assert_eq!(res.cells_evaluated, 15);

        let top = dstat_fast(&r, TruncationConfig { m1: 1, m2: 1 }).unwrap();
        assert_eq!(top.cells_evaluated, 1);
        assert_eq!(top.argmax_cell, (4, 4));
        assert!((top.statistic - expected).abs() < 1e-12);
    }

    #[test]
    fn constant_sequence_is_degenerate() {
        let r = ranked(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]);
        assert!(matches!(
            dstat_fast(&r, TruncationConfig::full(3)),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn all_zero_plateau_breaks_ties_by_smallest_cell() {
        // Every cell has p c12 == c1 c2.
        let r = ranked(&[0.0, 0.0, 1.0, 1.0], &[0.0, 1.0, 0.0, 1.0]);
        let naive = dstat_naive(&r, TruncationConfig::full(4)).unwrap();
        assert_eq!(naive.statistic, 0.0);
        assert_eq!(naive.argmax_cell, (1, 2));
        assert_eq!(dstat_fast(&r, TruncationConfig::full(4)).unwrap(), naive);
    }

    #[test]
    fn result_matches_recomputed_cell() {
        let t1 = [0.3, 2.0, 1.1, 5.0, 0.2, 0.9, 3.3];
        let t2 = [1.0, 0.1, 2.2, 4.0, 0.0, 3.1, 0.5];
        let r = ranked(&t1, &t2);
        let res = dstat_fast(&r, TruncationConfig::full(7)).unwrap();
        let again = cell_statistic(&r, res.argmax_cell.0, res.argmax_cell.1).unwrap();
        assert!((again - res.statistic).abs() <= 1e-12 * res.statistic.max(1.0));
    }
}
