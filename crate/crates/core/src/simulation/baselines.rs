//! Competing statistics: Spearman's rank correlation, the max test and
//! higher criticism.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::empirical::PairedStatistics;
use crate::error::{Error, Result};
use crate::normal;

/// 1-based ranks with ties replaced by their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpearmanResult {
    pub rho: f64,
    /// One-sided p-value for `rho > 0` from `z = rho sqrt(p - 1)`.
    pub p_value: f64,
}

/// Centered ranks of both sequences, reused across permutations.
#[derive(Debug, Clone)]
pub(crate) struct SpearmanRanks {
    pub(crate) r1: Vec<f64>,
    pub(crate) r2: Vec<f64>,
    norm: f64,
}

impl SpearmanRanks {
    pub(crate) fn new(pairs: &PairedStatistics) -> Result<Self> {
        let p = pairs.len();
        if p < 3 {
            return Err(Error::TooFewPoints {
                required: 3,
                got: p,
            });
        }
        let center = |v: Vec<f64>| {
            let mean = (p as f64 + 1.0) / 2.0;
            v.into_iter().map(|r| r - mean).collect::<Vec<_>>()
        };
        let r1 = center(average_ranks(pairs.t1()));
        let r2 = center(average_ranks(pairs.t2()));
        let ss1: f64 = r1.iter().map(|x| x * x).sum();
        let ss2: f64 = r2.iter().map(|x| x * x).sum();
        if ss1 == 0.0 || ss2 == 0.0 {
            return Err(Error::DegenerateInput(
                "rank correlation is undefined for a constant sequence".into(),
            ));
        }
        Ok(Self {
            r1,
            r2,
            norm: (ss1 * ss2).sqrt(),
        })
    }

    /// Correlation after pairing `t2[j]` with `t1[perm(j)]`.
    pub(crate) fn rho_with(&self, perm: impl Fn(usize) -> usize) -> f64 {
        let cross: f64 = self
            .r2
            .iter()
            .enumerate()
            .map(|(j, &b)| self.r1[perm(j)] * b)
            .sum();
        cross / self.norm
    }
}

pub fn spearman_test(pairs: &PairedStatistics) -> Result<SpearmanResult> {
    let ranks = SpearmanRanks::new(pairs)?;
    let rho = ranks.rho_with(|j| j);
    let z = rho * ((pairs.len() - 1) as f64).sqrt();
    Ok(SpearmanResult {
        rho,
        p_value: normal::sf(z),
    })
}

/// `max_j min(t1[j], t2[j])`.
pub fn max_test_stat(pairs: &PairedStatistics) -> f64 {
    pairs
        .t1()
        .iter()
        .zip(pairs.t2())
        .map(|(&a, &b)| a.min(b))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HigherCriticism {
    pub value: f64,
    /// No ordered p-value was at most 1/2; `value` is the `j = 1` term.
    pub fallback: bool,
}

const HC_CLAMP: f64 = 1e-15;

/// Higher criticism over sorted p-values restricted to `p_(j) <= 1/2`.
pub fn hc_stat(pvalues: &[f64]) -> Result<HigherCriticism> {
    if pvalues.is_empty() {
        return Err(Error::TooFewPoints {
            required: 1,
            got: 0,
        });
    }
    if let Some(bad) = pvalues.iter().find(|v| v.is_nan()) {
        return Err(Error::InvalidConfig(format!("p-value {bad} is not a number")));
    }
    let mut sorted: Vec<f64> = pvalues
        .iter()
        .map(|&q| q.clamp(HC_CLAMP, 1.0 - HC_CLAMP))
        .collect();
    sorted.sort_by(f64::total_cmp);
    Ok(hc_sorted(&sorted))
}

/// `hc_stat` of ascending, clamped p-values.
fn hc_sorted(sorted: &[f64]) -> HigherCriticism {
    let n = sorted.len() as f64;
    let term = |j: usize, q: f64| n.sqrt() * ((j + 1) as f64 / n - q) / (q * (1.0 - q)).sqrt();
    let restricted = sorted
        .iter()
        .enumerate()
        .take_while(|&(_, &q)| q <= 0.5)
        .map(|(j, &q)| term(j, q))
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    match restricted {
        Some(value) => HigherCriticism {
            value,
            fallback: false,
        },
        None => HigherCriticism {
            value: term(0, sorted[0]),
            fallback: true,
        },
    }
}

/// Higher criticism of `p` null p-values. Two-sided normal p-values are
/// uniform, so the order statistics are drawn directly as normalized
/// exponential spacings. `buf` is scratch space.
pub(crate) fn hc_null_draw<R: Rng>(rng: &mut R, p: usize, buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    let mut total = 0.0;
    for _ in 0..p {
        total += rng.sample::<f64, _>(Exp1);
        buf.push(total);
    }
    total += rng.sample::<f64, _>(Exp1);
    for v in buf.iter_mut() {
        *v = (*v / total).clamp(HC_CLAMP, 1.0 - HC_CLAMP);
    }
    hc_sorted(buf).value
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(t1: &[f64], t2: &[f64]) -> PairedStatistics {
        PairedStatistics::new(t1.to_vec(), t2.to_vec()).unwrap()
    }

    #[test]
    fn spearman_extremes() {
        let t = [0.3, 1.2, -0.4, 2.2, 0.9];
        let rev: Vec<f64> = t.iter().map(|x| -x).collect();
        assert!((spearman_test(&pairs(&t, &t)).unwrap().rho - 1.0).abs() < 1e-12);
        assert!((spearman_test(&pairs(&t, &rev)).unwrap().rho + 1.0).abs() < 1e-12);
    }

    #[test]
    fn spearman_constant_is_degenerate() {
        let err = spearman_test(&pairs(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0])).unwrap_err();
        assert!(matches!(err, Error::DegenerateInput(_)));
    }

    #[test]
    fn spearman_matches_pearson_of_ranks_with_ties() {
        let t1 = [1.0, 2.0, 2.0, 3.0, 5.0, 4.0];
        let t2 = [2.0, 1.0, 3.0, 3.0, 6.0, 0.5];
        let r1 = average_ranks(&t1);
        let r2 = average_ranks(&t2);
        assert_eq!(r1, vec![1.0, 2.5, 2.5, 4.0, 6.0, 5.0]);
        let mean = 3.5;
        let num: f64 = r1.iter().zip(&r2).map(|(a, b)| (a - mean) * (b - mean)).sum();
        let d1: f64 = r1.iter().map(|a| (a - mean).powi(2)).sum();
        let d2: f64 = r2.iter().map(|b| (b - mean).powi(2)).sum();
        let rho = spearman_test(&pairs(&t1, &t2)).unwrap().rho;
        assert!((rho - num / (d1 * d2).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn max_test_values() {
        assert_eq!(max_test_stat(&pairs(&[1.0, 3.0], &[2.0, 5.0])), 3.0);
        assert_eq!(max_test_stat(&pairs(&[4.5, 4.5], &[4.5, 4.5])), 4.5);
    }

    #[test]
    fn hc_hand_values() {
        let hc = hc_stat(&[0.01, 0.5]).unwrap();
        let expected = 2f64.sqrt() * 0.49 / (0.01f64 * 0.99).sqrt();
        assert!((hc.value - expected).abs() < 1e-12);
        // 6.96456, not the 6.96460 sometimes quoted
        assert!((hc.value - 6.964557).abs() < 1e-6);
        assert!(!hc.fallback);
        assert!((hc_stat(&[0.5]).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hc_without_small_pvalues_falls_back() {
        let hc = hc_stat(&[0.7, 0.9]).unwrap();
        assert!(hc.fallback);
        let expected = 2f64.sqrt() * (0.5 - 0.7) / (0.7f64 * 0.3).sqrt();
        assert!((hc.value - expected).abs() < 1e-12);
    }

    #[test]
    fn hc_on_uniform_grid_is_small_and_positive() {
        let n = 1000;
        let grid: Vec<f64> = (1..=n).map(|j| j as f64 / (n + 1) as f64).collect();
        let hc = hc_stat(&grid).unwrap();
        assert!(hc.value > 0.0 && hc.value < 2.0, "{}", hc.value);
    }

    #[test]
    fn null_draws_match_hc_of_normal_pvalues() {
        use rand_distr::StandardNormal;
        let (p, n) = (2000, 400);
        let mut buf = Vec::new();
        let mut a: Vec<f64> = (0..n)
            .map(|d| hc_null_draw(&mut crate::rng::stream_rng(1, d), p, &mut buf))
            .collect();
        let mut b: Vec<f64> = (0..n)
            .map(|d| {
                let mut rng = crate::rng::stream_rng(2, d);
                let pv: Vec<f64> = (0..p)
                    .map(|_| normal::two_sided_pvalue(rng.sample(StandardNormal)))
                    .collect();
                hc_stat(&pv).unwrap().value
            })
            .collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        // two-sample Kolmogorov-Smirnov distance, 0.1% critical value
        let ks = a
            .iter()
            .map(|&x| {
                let fa = a.partition_point(|&v| v <= x) as f64 / n as f64;
                let fb = b.partition_point(|&v| v <= x) as f64 / n as f64;
                (fa - fb).abs()
            })
            .fold(0.0, f64::max);
        assert!(ks < 1.95 * (2.0 / n as f64).sqrt(), "KS distance {ks}");
    }

    proptest::proptest! {
        #[test]
        fn max_test_bounded_by_marginal_maxima(
            v in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..40)
        ) {
            let (t1, t2): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            let m1 = t1.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let m2 = t2.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let s = max_test_stat(&pairs(&t1, &t2));
            proptest::prop_assert!(s <= m1.min(m2));
        }
    }
}
