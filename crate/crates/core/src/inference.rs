//! P-values and decision rules for excess simultaneous signal.
//!
//! Permutation inference re-pairs `t1` with a fixed `t2`, either by a
//! uniformly random shuffle or by a random cyclic rotation, which keeps the
//! serial structure within `t1`. The p-value is `(1 + #{D_b >= D}) / (B + 1)`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::empirical::{preprocess, DetectionResult, Grid, PairedStatistics, TruncationConfig};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::simulation::SpearmanRanks;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationScheme {
    /// Uniformly random permutation of the `t1` indices.
    FullShuffle,
    /// `t1` rotated left by a uniform offset in `1..p`.
    CyclicShift,
}

impl std::fmt::Display for PermutationScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PermutationScheme::FullShuffle => "shuffle",
            PermutationScheme::CyclicShift => "cyclic",
        })
    }
}

/// Statistic recomputed on every permutation replicate. Larger values are
/// more extreme for all kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    Dhat,
    MaxTest,
    Spearman,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermutationConfig {
    pub replicates: usize,
    pub scheme: PermutationScheme,
    pub seed: u64,
    pub truncation: TruncationConfig,
    /// Keep every replicate statistic in the result.
    pub keep_replicates: bool,
}

impl PermutationConfig {
    pub fn new(replicates: usize, scheme: PermutationScheme, seed: u64, truncation: TruncationConfig) -> Self {
        Self {
            replicates,
            scheme,
            seed,
            truncation,
            keep_replicates: false,
        }
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if self.replicates < 1 {
            return Err(Error::InvalidConfig("permutation count must be at least 1".into()));
        }
        if self.scheme == PermutationScheme::CyclicShift && p < 3 {
            return Err(Error::InvalidConfig(format!(
                "cyclic shifting needs p >= 3, got {p}"
            )));
        }
        self.truncation.validate(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationResult {
    pub kind: StatisticKind,
    pub observed_statistic: f64,
    /// Grid maximizer, for [`StatisticKind::Dhat`] only.
    pub observed: Option<DetectionResult>,
    pub exceed_count: usize,
    pub replicates: usize,
    pub p_value: f64,
    pub replicate_statistics: Option<Vec<f64>>,
    pub seed: u64,
    pub scheme: PermutationScheme,
}

/// `(1 + exceed) / (B + 1)`.
pub fn permutation_p_value(exceed_count: usize, replicates: usize) -> f64 {
    (1 + exceed_count) as f64 / (replicates + 1) as f64
}

/// Positions by decreasing `t2` (ties by decreasing index). Replicate
/// draws pair positions with `t1` indices in this order, so statistics that
/// only look at the largest `t2` values need only a prefix of the draws.
fn visit_order(pairs: &PairedStatistics) -> Vec<u32> {
    let t2 = pairs.t2();
    let mut idx: Vec<u32> = (0..t2.len() as u32).collect();
    idx.sort_unstable_by(|&a, &b| t2[b as usize].total_cmp(&t2[a as usize]).then(b.cmp(&a)));
    idx
}

/// One replicate's index map, drawn lazily in visiting order.
struct LazyPermutation<'a> {
    visit: &'a [u32],
    scheme: PermutationScheme,
    pool: Vec<u32>,
    swaps: Vec<(u32, u32)>,
    drawn: Vec<u32>,
    rng: rand_chacha::ChaCha8Rng,
    shift: usize,
}

impl<'a> LazyPermutation<'a> {
    fn new(visit: &'a [u32], scheme: PermutationScheme) -> Self {
        let p = visit.len();
        Self {
            visit,
            scheme,
            pool: match scheme {
                PermutationScheme::FullShuffle => (0..p as u32).collect(),
                PermutationScheme::CyclicShift => Vec::new(),
            },
            swaps: Vec::new(),
            drawn: Vec::new(),
            rng: stream_rng(0, 0),
            shift: 0,
        }
    }

    fn reset(&mut self, seed: u64, replicate: u64) {
        for &(i, k) in self.swaps.iter().rev() {
            self.pool.swap(i as usize, k as usize);
        }
        self.swaps.clear();
        self.drawn.clear();
        self.rng = stream_rng(seed, replicate);
        if self.scheme == PermutationScheme::CyclicShift {
            self.shift = self.rng.random_range(1..self.visit.len());
        }
    }

    /// `t1` index paired with position `visit[i]`.
    #[inline]
    fn source(&mut self, i: usize) -> usize {
        let p = self.visit.len();
        match self.scheme {
            PermutationScheme::CyclicShift => (self.visit[i] as usize + self.shift) % p,
            PermutationScheme::FullShuffle => {
                // Fisher-Yates, one step per visited position
                while self.drawn.len() <= i {
                    let k = self.drawn.len();
                    let pick = self.rng.random_range(k..p);
                    self.pool.swap(k, pick);
                    self.swaps.push((k as u32, pick as u32));
                    self.drawn.push(self.pool[k]);
                }
                self.drawn[i] as usize
            }
        }
    }

    fn full(&mut self) -> Vec<u32> {
        let mut perm = vec![0u32; self.visit.len()];
        for i in 0..perm.len() {
            perm[self.visit[i] as usize] = self.source(i) as u32;
        }
        perm
    }
}

/// Index map of one replicate: `t1'[j] = t1[perm[j]]`.
///
/// For the shuffle scheme the map is a uniform random permutation drawn by
/// Fisher-Yates over the positions in decreasing order of `t2`; the cyclic
/// scheme rotates by a uniform offset in `1..p`.
pub fn replicate_permutation(pairs: &PairedStatistics, scheme: PermutationScheme, seed: u64, replicate: u64) -> Vec<u32> {
    let visit = visit_order(pairs);
    let mut lazy = LazyPermutation::new(&visit, scheme);
    lazy.reset(seed, replicate);
    lazy.full()
}

/// Applies a replicate index map to `t1`.
pub fn apply_permutation(t1: &[f64], perm: &[u32]) -> Vec<f64> {
    perm.iter().map(|&i| t1[i as usize]).collect()
}

pub fn permutation_pvalue(
    pairs: &PairedStatistics,
    cfg: &PermutationConfig,
    kind: StatisticKind,
) -> Result<PermutationResult> {
    let mut out = permutation_pvalues(pairs, cfg, &[kind])?;
    Ok(out.remove(0))
}

/// Several statistics evaluated on the same permutation replicates.
pub fn permutation_pvalues(
    pairs: &PairedStatistics,
    cfg: &PermutationConfig,
    kinds: &[StatisticKind],
) -> Result<Vec<PermutationResult>> {
    let p = pairs.len();
    cfg.validate(p)?;
    if p < 2 {
        return Err(Error::TooFewPoints { required: 2, got: p });
    }
    let ranked = match kinds.contains(&StatisticKind::Dhat) {
        true => Some(preprocess(pairs)?),
        false => None,
    };
    let grid = ranked.as_ref().map(|r| Grid::new(r, cfg.truncation)).transpose()?;
    let spearman = match kinds.contains(&StatisticKind::Spearman) {
        true => Some(SpearmanRanks::new(pairs)?),
        false => None,
    };
    let (t1, t2) = (pairs.t1(), pairs.t2());
    let visit = visit_order(pairs);
    let region2 = grid.as_ref().map_or(0, |g| g.region2_len());

    let dhat_points = |src: &mut dyn FnMut(usize) -> usize| -> Vec<(u32, u32)> {
        let (l1, l2) = {
            let r = ranked.as_ref().unwrap();
            (&r.first().level, &r.second().level)
        };
        (0..region2)
            .map(|i| (l1[src(i)], l2[visit[i] as usize]))
            .collect()
    };
    let max_test = |src: &mut dyn FnMut(usize) -> usize| {
        let mut best = f64::NEG_INFINITY;
        for (i, &pos) in visit.iter().enumerate() {
            let b = t2[pos as usize];
            if b <= best {
                break;
            }
            best = best.max(t1[src(i)].min(b));
        }
        best
    };
    let rho = |src: &mut dyn FnMut(usize) -> usize| {
        let ranks = spearman.as_ref().unwrap();
        let mut perm = vec![0usize; p];
        for (i, &pos) in visit.iter().enumerate() {
            perm[pos as usize] = src(i);
        }
        ranks.rho_with(|j| perm[j])
    };

    let mut observed = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let mut identity = |i: usize| visit[i] as usize;
        observed.push(match kind {
            StatisticKind::Dhat => {
                let res = grid.as_ref().unwrap().fast_points(dhat_points(&mut identity))?;
                (res.statistic, Some(res))
            }
            StatisticKind::MaxTest => (max_test(&mut identity), None),
            StatisticKind::Spearman => (rho(&mut identity), None),
        });
    }

    // per replicate: (exceeds, statistic if kept) for each kind
    let per_replicate: Vec<Vec<(bool, f64)>> = (0..cfg.replicates as u64)
        .into_par_iter()
        .map_init(
            || LazyPermutation::new(&visit, cfg.scheme),
            |lazy, b| {
                lazy.reset(cfg.seed, b);
                let mut src = |i: usize| lazy.source(i);
                kinds
                    .iter()
                    .zip(&observed)
                    .map(|(&kind, &(obs, _))| {
                        Ok(match kind {
                            StatisticKind::Dhat if !cfg.keep_replicates => {
                                let pts = dhat_points(&mut src);
                                (grid.as_ref().unwrap().exceeds(pts, obs), f64::NAN)
                            }
                            StatisticKind::Dhat => {
                                let s = grid.as_ref().unwrap().fast_points(dhat_points(&mut src))?.statistic;
                                (s >= obs, s)
                            }
                            StatisticKind::MaxTest => {
                                let s = max_test(&mut src);
                                (s >= obs, s)
                            }
                            StatisticKind::Spearman => {
                                let s = rho(&mut src);
                                (s >= obs, s)
                            }
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            },
        )
        .collect::<Result<_>>()?;

    Ok(kinds
        .iter()
        .zip(observed)
        .enumerate()
        .map(|(i, (&kind, (observed_statistic, observed)))| {
            let exceed_count = per_replicate.iter().filter(|r| r[i].0).count();
            PermutationResult {
                kind,
                observed_statistic,
                observed,
                exceed_count,
                replicates: cfg.replicates,
                p_value: permutation_p_value(exceed_count, cfg.replicates),
                replicate_statistics: cfg
                    .keep_replicates
                    .then(|| per_replicate.iter().map(|r| r[i].1).collect()),
                seed: cfg.seed,
                scheme: cfg.scheme,
            }
        })
        .collect())
}

/// `exp(-x^2)` with `x = dhat / sqrt(ln p)`.
///
/// Large-`p` tail approximation for the statistic with known marginals; it
/// converges slowly and is reported for reference next to permutation
/// p-values.
pub fn asymptotic_pvalue(dhat: f64, p: usize) -> Result<f64> {
    if p < 3 {
        return Err(Error::InvalidConfig(format!("asymptotic p-value needs p >= 3, got {p}")));
    }
    if !(dhat >= 0.0) {
        return Err(Error::InvalidConfig(format!("statistic {dhat} must be nonnegative")));
    }
    let x = dhat / (p as f64).ln().sqrt();
    Ok((-x * x).exp().max(f64::MIN_POSITIVE))
}

/// `ln p (ln ln p)^2 + 3 (ln ln p)^2`.
pub fn adaptive_threshold(p: usize) -> Result<f64> {
    if p < 16 {
        return Err(Error::InvalidConfig(format!("adaptive test needs p >= 16, got {p}")));
    }
    let lp = (p as f64).ln();
    let llp = lp.ln();
    Ok(lp * llp * llp + 3.0 * llp * llp)
}

/// Rejects when `dhat` exceeds [`adaptive_threshold`].
pub fn adaptive_test(dhat: f64, p: usize) -> Result<bool> {
    Ok(dhat > adaptive_threshold(p)?)
}
