use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Sequence};

/// Two index-paired sequences of test statistics.
///
/// Construction rejects NaN and infinite values and normalizes `-0.0` to
/// `0.0`, so that sorting by total order and comparing with `==` agree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedStatistics {
    t1: Vec<f64>,
    t2: Vec<f64>,
}

impl PairedStatistics {
    pub fn new(t1: Vec<f64>, t2: Vec<f64>) -> Result<Self> {
        if t1.len() != t2.len() {
            return Err(Error::LengthMismatch {
                len1: t1.len(),
                len2: t2.len(),
            });
        }
        if t1.is_empty() {
            return Err(Error::TooFewPoints {
                required: 1,
                got: 0,
            });
        }
        if u32::try_from(t1.len()).is_err() {
            return Err(Error::InvalidConfig(format!(
                "at most {} pairs are supported",
                u32::MAX
            )));
        }
        let t1 = normalize(t1, Sequence::First)?;
        let t2 = normalize(t2, Sequence::Second)?;
        Ok(Self { t1, t2 })
    }

    /// Number of paired features `p`.
    pub fn len(&self) -> usize {
        self.t1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t1.is_empty()
    }

    pub fn t1(&self) -> &[f64] {
        &self.t1
    }

    pub fn t2(&self) -> &[f64] {
        &self.t2
    }

    /// The same pairs with the roles of the two sequences exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            t1: self.t2.clone(),
            t2: self.t1.clone(),
        }
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.t1, self.t2)
    }
}

fn normalize(mut values: Vec<f64>, sequence: Sequence) -> Result<Vec<f64>> {
    for (index, v) in values.iter_mut().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteValue {
                sequence,
                index,
                value: *v,
            });
        }
        // -0.0 + 0.0 == +0.0
        *v += 0.0;
    }
    Ok(values)
}

/// Number of top distinct order statistics of each sequence that the grid
/// search visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationConfig {
    pub m1: usize,
    pub m2: usize,
}

impl TruncationConfig {
    pub const DEFAULT_CAP: usize = 1000;

    pub fn new(m1: usize, m2: usize, p: usize) -> Result<Self> {
        let cfg = Self { m1, m2 };
        cfg.validate(p)?;
        Ok(cfg)
    }

    /// Visit every distinct order statistic.
    pub fn full(p: usize) -> Self {
        Self { m1: p, m2: p }
    }

    /// `m1 = m2 = min(p, 1000)`.
    pub fn default_for(p: usize) -> Self {
        let m = p.min(Self::DEFAULT_CAP);
        Self { m1: m, m2: m }
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        for (name, m) in [("m1", self.m1), ("m2", self.m2)] {
            if m == 0 || m > p {
                return Err(Error::InvalidTruncation(format!(
                    "{name} = {m} must lie in [1, {p}]"
                )));
            }
        }
        Ok(())
    }

    pub fn swapped(&self) -> Self {
        Self {
            m1: self.m2,
            m2: self.m1,
        }
    }
}

/// Sorted view of one sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedSequence {
    /// Indices that sort the sequence ascending (ties broken by index).
    pub order: Vec<u32>,
    /// Max-rank convention: `rank[j] = #{i : t[i] <= t[j]}`.
    pub rank: Vec<u32>,
    /// Ascending distinct values.
    pub distinct: Vec<f64>,
    /// `level[j]` is the position of `t[j]` in `distinct`.
    pub level: Vec<u32>,
    /// `survival[d] = #{i : t[i] >= distinct[d]}`.
    pub survival: Vec<u32>,
}

impl RankedSequence {
    fn build(values: &[f64]) -> Self {
        let p = values.len();
        // Sorting (key, index) pairs keeps memory access sequential on large inputs.
        let mut keyed: Vec<(u64, u32)> = values
            .iter()
            .enumerate()
            .map(|(j, &v)| (order_key(v), j as u32))
            .collect();
        keyed.sort_unstable();

        let order: Vec<u32> = keyed.iter().map(|&(_, j)| j).collect();
        drop(keyed);

        let mut rank = vec![0u32; p];
        let mut level = vec![0u32; p];
        let mut distinct = Vec::new();
        let mut survival = Vec::new();

        let mut start = 0;
        while start < p {
            let value = values[order[start] as usize];
            let mut end = start + 1;
            while end < p && values[order[end] as usize] == value {
                end += 1;
            }
            let d = distinct.len() as u32;
            distinct.push(value);
            survival.push((p - start) as u32);
            for &j in &order[start..end] {
                rank[j as usize] = end as u32;
                level[j as usize] = d;
            }
            start = end;
        }

        Self {
            order,
            rank,
            distinct,
            level,
            survival,
        }
    }

    /// Number of distinct values.
    pub fn distinct_len(&self) -> usize {
        self.distinct.len()
    }
}

/// Monotone map from finite `f64` to `u64`.
fn order_key(v: f64) -> u64 {
    let bits = v.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

/// Paired statistics together with their order statistics and ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedPairs {
    source: PairedStatistics,
    first: RankedSequence,
    second: RankedSequence,
}

impl RankedPairs {
    pub fn source(&self) -> &PairedStatistics {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn first(&self) -> &RankedSequence {
        &self.first
    }

    pub fn second(&self) -> &RankedSequence {
        &self.second
    }

    pub fn order1(&self) -> &[u32] {
        &self.first.order
    }

    pub fn order2(&self) -> &[u32] {
        &self.second.order
    }

    pub fn rank1(&self) -> &[u32] {
        &self.first.rank
    }

    pub fn rank2(&self) -> &[u32] {
        &self.second.rank
    }

    pub fn distinct1(&self) -> &[f64] {
        &self.first.distinct
    }

    pub fn distinct2(&self) -> &[f64] {
        &self.second.distinct
    }

    /// `#{j : t1[j] >= t}` for an arbitrary threshold `t`.
    pub fn survival_count1(&self, t: f64) -> usize {
        survival_count(&self.first, t)
    }

    /// `#{j : t2[j] >= t}` for an arbitrary threshold `t`.
    pub fn survival_count2(&self, t: f64) -> usize {
        survival_count(&self.second, t)
    }
}

fn survival_count(seq: &RankedSequence, t: f64) -> usize {
    let d = seq.distinct.partition_point(|&v| v < t);
    seq.survival.get(d).map_or(0, |&c| c as usize)
}

/// Sorts and ranks both sequences. Requires `p >= 2`.
pub fn preprocess(pairs: &PairedStatistics) -> Result<RankedPairs> {
    let p = pairs.len();
    if p < 2 {
        return Err(Error::TooFewPoints {
            required: 2,
            got: p,
        });
    }
    let first = RankedSequence::build(pairs.t1());
    let second = RankedSequence::build(pairs.t2());
    Ok(RankedPairs {
        source: pairs.clone(),
        first,
        second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(t1: &[f64], t2: &[f64]) -> PairedStatistics {
        PairedStatistics::new(t1.to_vec(), t2.to_vec()).unwrap()
    }

    #[test]
    fn ranks_by_inspection() {
        let r = preprocess(&pairs(&[3.0, 1.0, 2.0], &[0.0, 0.0, 1.0])).unwrap();
        let sorted: Vec<f64> = r.order1().iter().map(|&j| r.source().t1()[j as usize]).collect();
        assert_eq!(sorted, vec![1.0, 2.0, 3.0]);
        assert_eq!(r.rank1(), &[3, 1, 2]);
        assert_eq!(r.distinct2(), &[0.0, 1.0]);
    }

    #[test]
    fn survival_counts_use_greater_or_equal() {
        let r = preprocess(&pairs(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(r.survival_count1(1.0), 3);
        assert_eq!(r.survival_count1(1.5), 1);
        assert_eq!(r.survival_count1(2.5), 0);
        assert_eq!(r.first().survival, vec![3, 1]);
        // max-rank convention under ties
        assert_eq!(r.rank1(), &[2, 2, 3]);
    }

    #[test]
    fn single_pair_is_too_few() {
        let err = preprocess(&pairs(&[5.0], &[1.0])).unwrap_err();
        assert_eq!(err, Error::TooFewPoints { required: 2, got: 1 });
    }

    #[test]
    fn rejects_non_finite() {
        let err = PairedStatistics::new(vec![1.0, 2.0], vec![0.0, f64::NAN]).unwrap_err();
        assert!(matches!(
            err,
            Error::NonFiniteValue {
                sequence: Sequence::Second,
                index: 1,
                ..
            }
        ));
        let err = PairedStatistics::new(vec![f64::INFINITY, 2.0], vec![0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteValue { index: 0, .. }));
    }

    #[test]
    fn rejects_length_mismatch() {
        let err = PairedStatistics::new(vec![1.0, 2.0], vec![0.0]).unwrap_err();
        assert_eq!(err, Error::LengthMismatch { len1: 2, len2: 1 });
    }

    #[test]
    fn negative_zero_is_tied_with_zero() {
        let r = preprocess(&pairs(&[-0.0, 0.0, -1.0], &[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(r.distinct1().len(), 2);
        assert_eq!(r.rank1(), &[3, 3, 1]);
    }

    #[test]
    fn order_key_is_monotone() {
        let xs = [-1e300, -2.5, -1e-300, 0.0, 1e-300, 3.0, 1e300];
        for w in xs.windows(2) {
            assert!(order_key(w[0]) < order_key(w[1]));
        }
    }

    #[test]
    fn truncation_bounds() {
        assert!(TruncationConfig::new(0, 1, 5).is_err());
        assert!(TruncationConfig::new(6, 1, 5).is_err());
        assert_eq!(TruncationConfig::default_for(20_000).m1, 1000);
        assert_eq!(TruncationConfig::default_for(20).m2, 20);
    }

    proptest::proptest! {
        #[test]
        fn order_sorts_and_counts_match(values in proptest::collection::vec(-50i32..50, 2..60)) {
            let t: Vec<f64> = values.iter().map(|&v| v as f64 / 4.0).collect();
            let r = preprocess(&pairs(&t, &t)).unwrap();
            let sorted: Vec<f64> = r.order1().iter().map(|&j| t[j as usize]).collect();
            proptest::prop_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
            for (j, &tj) in t.iter().enumerate() {
                let ge = t.iter().filter(|&&x| x >= tj).count();
                let le = t.iter().filter(|&&x| x <= tj).count();
                proptest::prop_assert_eq!(r.survival_count1(tj), ge);
                proptest::prop_assert_eq!(r.rank1()[j] as usize, le);
            }
        }
    }
}
