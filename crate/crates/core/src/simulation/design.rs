//! Latent signal indicators and the conditional sampling of test statistics.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::empirical::PairedStatistics;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// Signals placed independently in each sequence.
    Null,
    /// `n12` features forced to be non-null in both sequences.
    Alternative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatentAssignment {
    pub i1: Vec<bool>,
    pub i2: Vec<bool>,
    pub n1: usize,
    pub n2: usize,
    /// Designated simultaneous signals; chance overlap comes on top.
    pub n12: usize,
    pub seed: u64,
}

impl LatentAssignment {
    pub fn len(&self) -> usize {
        self.i1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i1.is_empty()
    }

    /// Features non-null in both sequences.
    pub fn overlap(&self) -> usize {
        self.i1.iter().zip(&self.i2).filter(|&(&a, &b)| a && b).count()
    }
}

pub fn assign_latent(
    p: usize,
    n1: usize,
    n2: usize,
    n12: usize,
    hypothesis: Hypothesis,
    seed: u64,
) -> Result<LatentAssignment> {
    if n1 > p || n2 > p {
        return Err(Error::CountOverflow(format!("signal counts ({n1}, {n2}) exceed p = {p}")));
    }
    let n12 = match hypothesis {
        Hypothesis::Null => 0,
        Hypothesis::Alternative => n12,
    };
    if n12 > n1.min(n2) {
        return Err(Error::CountOverflow(format!(
            "n12 = {n12} exceeds min(n1, n2) = {}",
            n1.min(n2)
        )));
    }

    let mut i1 = vec![false; p];
    let mut i2 = vec![false; p];
    let mut shared_rng = stream_rng(seed, 0);
    let shared = sample(&mut shared_rng, p, n12);
    // features outside the shared set
    let mut rest = vec![true; p];
    for j in shared.iter() {
        i1[j] = true;
        i2[j] = true;
        rest[j] = false;
    }
    let free: Vec<usize> = (0..p).filter(|&j| rest[j]).collect();
    for (k, (ind, n)) in [(&mut i1, n1), (&mut i2, n2)].into_iter().enumerate() {
        let mut rng = stream_rng(seed, 1 + k as u64);
        for pos in sample(&mut rng, free.len(), n - n12).iter() {
            ind[free[pos]] = true;
        }
    }
    Ok(LatentAssignment {
        i1,
        i2,
        n1,
        n2,
        n12,
        seed,
    })
}

/// Distribution of one statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Dist {
    Normal { mu: f64, sigma: f64 },
    /// `|N(mu, sigma^2)|`.
    FoldedNormal { mu: f64, sigma: f64 },
}

impl Dist {
    pub fn standard_folded() -> Self {
        Dist::FoldedNormal { mu: 0.0, sigma: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        let (Dist::Normal { mu, sigma } | Dist::FoldedNormal { mu, sigma }) = *self;
        check_params(mu, sigma)
    }

    /// Transforms a standard normal draw.
    #[inline]
    fn map_standard(&self, z: f64) -> f64 {
        match *self {
            Dist::Normal { mu, sigma } => mu + sigma * z,
            Dist::FoldedNormal { mu, sigma } => (mu + sigma * z).abs(),
        }
    }
}

fn check_params(mu: f64, sigma: f64) -> Result<()> {
    if !(mu.is_finite() && sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "distribution parameters mu = {mu}, sigma = {sigma} must be finite with sigma > 0"
        )));
    }
    Ok(())
}

/// Non-null distribution of one sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AltSpec {
    Common(Dist),
    /// Feature `j` draws from `N(mu[j], sigma[j]^2)`, folded if requested.
    PerFeature { mu: Vec<f64>, sigma: Vec<f64>, folded: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub null: Dist,
    pub alt: AltSpec,
}

impl SequenceSpec {
    fn validate(&self, p: usize) -> Result<()> {
        self.null.validate()?;
        match &self.alt {
            AltSpec::Common(d) => d.validate(),
            AltSpec::PerFeature { mu, sigma, .. } => {
                if mu.len() != p || sigma.len() != p {
                    return Err(Error::InvalidConfig(format!(
                        "per-feature parameters have lengths ({}, {}), expected {p}",
                        mu.len(),
                        sigma.len()
                    )));
                }
                mu.iter().zip(sigma).try_for_each(|(&m, &s)| check_params(m, s))
            }
        }
    }

    #[inline]
    fn draw(&self, j: usize, signal: bool, z: f64) -> f64 {
        if !signal {
            return self.null.map_standard(z);
        }
        match &self.alt {
            AltSpec::Common(d) => d.map_standard(z),
            AltSpec::PerFeature { mu, sigma, folded } => {
                let v = mu[j] + sigma[j] * z;
                if *folded {
                    v.abs()
                } else {
                    v
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub first: SequenceSpec,
    pub second: SequenceSpec,
}

impl MixtureSpec {
    pub fn validate(&self, p: usize) -> Result<()> {
        self.first.validate(p)?;
        self.second.validate(p)
    }
}

/// Per-feature alternatives with `mu_j ~ N(mu_mean, mu_sd^2)` and
/// `sigma_j^2 ~ Gamma(shape, scale)`, folded.
pub fn heterogeneous_alternative(p: usize, mu_mean: f64, mu_sd: f64, var_shape: f64, var_scale: f64, seed: u64) -> Result<AltSpec> {
    let gamma = Gamma::new(var_shape, var_scale)
        .map_err(|e| Error::InvalidConfig(format!("variance distribution: {e}")))?;
    check_params(mu_mean, mu_sd)?;
    let mut rng = stream_rng(seed, 0);
    let mut mu = Vec::with_capacity(p);
    let mut sigma = Vec::with_capacity(p);
    for _ in 0..p {
        let z: f64 = rng.sample(StandardNormal);
        mu.push(mu_mean + mu_sd * z);
        sigma.push(gamma.sample(&mut rng).sqrt());
    }
    Ok(AltSpec::PerFeature { mu, sigma, folded: true })
}

/// Serial structure of the standard normal noise within each sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Noise {
    Independent,
    /// Stationary AR(1) with lag-one correlation `rho`.
    Ar1 { rho: f64 },
}

impl Noise {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Noise::Independent => Ok(()),
            Noise::Ar1 { rho } if (0.0..1.0).contains(&rho) => Ok(()),
            Noise::Ar1 { rho } => Err(Error::InvalidConfig(format!("block_rho = {rho} must lie in [0, 1)"))),
        }
    }

    fn fill(&self, rng: &mut impl Rng, out: &mut [f64]) {
        match *self {
            Noise::Independent => {
                for z in out.iter_mut() {
                    *z = rng.sample(StandardNormal);
                }
            }
            Noise::Ar1 { rho } => {
                let innov = (1.0 - rho * rho).sqrt();
                let mut prev: f64 = rng.sample(StandardNormal);
                for (j, z) in out.iter_mut().enumerate() {
                    if j > 0 {
                        let e: f64 = rng.sample(StandardNormal);
                        prev = rho * prev + innov * e;
                    }
                    *z = prev;
                }
            }
        }
    }
}

/// Draws the statistics given fixed indicators; the two sequences use
/// independent streams.
pub fn sample_pairs(assign: &LatentAssignment, spec: &MixtureSpec, seed: u64) -> Result<PairedStatistics> {
    sample_pairs_with(assign, spec, Noise::Independent, seed)
}

pub fn sample_pairs_with(assign: &LatentAssignment, spec: &MixtureSpec, noise: Noise, seed: u64) -> Result<PairedStatistics> {
    let p = assign.len();
    spec.validate(p)?;
    noise.validate()?;
    let draw = |seq: &SequenceSpec, ind: &[bool], stream: u64| {
        let mut z = vec![0.0; p];
        noise.fill(&mut stream_rng(seed, stream), &mut z);
        for (j, v) in z.iter_mut().enumerate() {
            *v = seq.draw(j, ind[j], *v);
        }
        z
    };
    let t1 = draw(&spec.first, &assign.i1, 0);
    let t2 = draw(&spec.second, &assign.i2, 1);
    PairedStatistics::new(t1, t2)
}

/// Null pairs with AR(1) latent normals, folded, independent between the
/// two sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedDesign {
    pub p: usize,
    pub block_rho: f64,
    pub seed: u64,
}

pub fn gen_correlated_design(p: usize, block_rho: f64, seed: u64) -> Result<CorrelatedDesign> {
    Noise::Ar1 { rho: block_rho }.validate()?;
    if p < 2 {
        return Err(Error::TooFewPoints { required: 2, got: p });
    }
    Ok(CorrelatedDesign { p, block_rho, seed })
}

impl CorrelatedDesign {
    /// Latent normals of sequence `k` (0 or 1) in one realization.
    pub fn latent(&self, realization: u64, k: u64) -> Vec<f64> {
        let mut z = vec![0.0; self.p];
        let seed = crate::rng::derive_seed(self.seed, realization);
        Noise::Ar1 { rho: self.block_rho }.fill(&mut stream_rng(seed, k), &mut z);
        z
    }

    pub fn sample(&self, realization: u64) -> PairedStatistics {
        let fold = |z: Vec<f64>| z.into_iter().map(f64::abs).collect();
        PairedStatistics::new(fold(self.latent(realization, 0)), fold(self.latent(realization, 1)))
            .expect("generated values are finite")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn null_spec() -> MixtureSpec {
        let s = SequenceSpec {
            null: Dist::standard_folded(),
            alt: AltSpec::Common(Dist::FoldedNormal { mu: 3.0, sigma: 1.0 }),
        };
        MixtureSpec {
            first: s.clone(),
            second: s,
        }
    }

    #[test]
    fn assignment_counts() {
        let a = assign_latent(10, 2, 3, 1, Hypothesis::Alternative, 9).unwrap();
        assert_eq!(a.i1.iter().filter(|&&x| x).count(), 2);
        assert_eq!(a.i2.iter().filter(|&&x| x).count(), 3);
        assert!(a.overlap() >= 1);
        assert_eq!(a, assign_latent(10, 2, 3, 1, Hypothesis::Alternative, 9).unwrap());
        assert!(matches!(
            assign_latent(10, 2, 3, 5, Hypothesis::Alternative, 9),
            Err(Error::CountOverflow(_))
        ));
        assert!(matches!(assign_latent(10, 11, 3, 0, Hypothesis::Null, 9), Err(Error::CountOverflow(_))));
    }

    #[test]
    fn null_ignores_shared_count() {
        let a = assign_latent(50, 5, 5, 5, Hypothesis::Null, 3).unwrap();
        assert_eq!(a.n12, 0);
        assert_eq!(a.i1.iter().filter(|&&x| x).count(), 5);
    }

    #[test]
    fn folded_null_is_nonnegative_and_reproducible() {
        let a = assign_latent(500, 0, 0, 0, Hypothesis::Null, 1).unwrap();
        let x = sample_pairs(&a, &null_spec(), 7).unwrap();
        assert!(x.t1().iter().chain(x.t2()).all(|&v| v >= 0.0));
        assert_eq!(x, sample_pairs(&a, &null_spec(), 7).unwrap());
        assert_ne!(x, sample_pairs(&a, &null_spec(), 8).unwrap());
    }

    #[test]
    fn folded_alternative_mean() {
        let p = 10_000;
        let a = assign_latent(p, p, 0, 0, Hypothesis::Null, 1).unwrap();
        let x = sample_pairs(&a, &null_spec(), 11).unwrap();
        let mean = x.t1().iter().sum::<f64>() / p as f64;
        // E|N(3, 1)| = 3 (1 - 2 Phi(-3)) + 2 phi(3)
        let phi3 = (-4.5f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let expected = 3.0 * (1.0 - 2.0 * crate::normal::cdf(-3.0)) + 2.0 * phi3;
        let var = 9.0 + 1.0 - expected * expected;
        assert!((mean - expected).abs() < 3.0 * (var / p as f64).sqrt(), "{mean} vs {expected}");
    }

    #[test]
    fn heterogeneous_parameters_are_fixed_by_seed() {
        let a = heterogeneous_alternative(100, 2.5, 1.0, 2.0, 1.0, 4).unwrap();
        assert_eq!(a, heterogeneous_alternative(100, 2.5, 1.0, 2.0, 1.0, 4).unwrap());
        let AltSpec::PerFeature { sigma, .. } = a else { unreachable!() };
        assert!(sigma.iter().all(|&s| s > 0.0));
    }

    #[test]
    fn ar1_lag_one_correlation() {
        let d = gen_correlated_design(10_000, 0.5, 2).unwrap();
        let z = d.latent(0, 0);
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
        let cov = z.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum::<f64>();
        assert!((cov / var - 0.5).abs() < 0.05);
        assert_eq!(d.sample(3), d.sample(3));
        assert!(gen_correlated_design(10, 1.0, 2).is_err());
    }

    #[test]
    fn zero_correlation_matches_folded_normal() {
        // Kolmogorov-Smirnov distance against the half-normal cdf
        let d = gen_correlated_design(10_000, 0.0, 5).unwrap();
        let mut x = d.sample(0).into_parts().0;
        x.sort_by(f64::total_cmp);
        let n = x.len() as f64;
        let ks = x
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let f = 2.0 * crate::normal::cdf(v) - 1.0;
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        // 1% critical value
        assert!(ks < 1.63 / n.sqrt(), "{ks}");
    }
}
