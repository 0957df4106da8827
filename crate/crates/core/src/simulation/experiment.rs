//! Fixed-effect experiments: indicators and alternative parameters are drawn
//! once, statistics are redrawn in every replicate, and each method's
//! rejections at level `alpha` are counted.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::baselines::{hc_null_draw, hc_stat, spearman_test};
use super::calibrate::calibrate;
use super::design::{
    assign_latent, heterogeneous_alternative, sample_pairs_with, AltSpec, Dist, Hypothesis, MixtureSpec, Noise,
    SequenceSpec,
};
use crate::empirical::{PairedStatistics, TruncationConfig};
use crate::error::{Error, Result};
use crate::inference::{permutation_p_value, permutation_pvalues, PermutationConfig, PermutationScheme, StatisticKind};
use crate::normal;
use crate::rng::{derive_seed, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dhat,
    MaxTest,
    /// One-sided normal approximation.
    Spearman,
    /// Higher criticism on the two-sided p-values of `t1` only.
    HigherCriticism,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Dhat => "dhat",
            Method::MaxTest => "max",
            Method::Spearman => "spearman",
            Method::HigherCriticism => "hc",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dhat" => Ok(Method::Dhat),
            "max" => Ok(Method::MaxTest),
            "spearman" => Ok(Method::Spearman),
            "hc" => Ok(Method::HigherCriticism),
            _ => Err(Error::InvalidConfig(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalCounts {
    pub n1: usize,
    pub n2: usize,
    pub n12: usize,
}

/// Non-null distribution before per-experiment parameters are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AltModel {
    Common(Dist),
    /// Folded `N(mu_j, sigma_j^2)` with `mu_j ~ N(mu_mean, mu_sd^2)` and
    /// `sigma_j^2 ~ Gamma(var_shape, var_scale)`.
    Heterogeneous {
        mu_mean: f64,
        mu_sd: f64,
        var_shape: f64,
        var_scale: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceModel {
    pub null: Dist,
    pub alt: AltModel,
}

impl SequenceModel {
    fn realize(&self, p: usize, seed: u64) -> Result<SequenceSpec> {
        let alt = match self.alt {
            AltModel::Common(d) => AltSpec::Common(d),
            AltModel::Heterogeneous {
                mu_mean,
                mu_sd,
                var_shape,
                var_scale,
            } => heterogeneous_alternative(p, mu_mean, mu_sd, var_shape, var_scale, seed)?,
        };
        Ok(SequenceSpec { null: self.null, alt })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub label: String,
    pub p: usize,
    pub replicates: usize,
    pub alpha: f64,
    pub hypothesis: Hypothesis,
    pub counts: SignalCounts,
    pub first: SequenceModel,
    pub second: SequenceModel,
    pub noise: Noise,
    pub methods: Vec<Method>,
    /// Replicate `r` permutes with seed `derive_seed(permutation.seed, r)`.
    pub permutation: PermutationConfig,
    /// Null realizations calibrating higher criticism, drawn afresh in
    /// every replicate.
    pub hc_null_draws: usize,
    pub seed: u64,
    /// Record wall-clock times in the report.
    pub timing: bool,
}

const ASSIGN: u64 = 1;
const PARAMS: u64 = 2;
const DATA: u64 = 3;
const HC_NULL: u64 = 4;

impl ExperimentConfig {
    /// Type I error setting with `n1`, `n2` signals at `p = 1000`: folded
    /// standard normal nulls and folded heterogeneous alternatives with
    /// `mu ~ N(2.5, 1)`, `sigma^2 ~ Gamma(2, 1)`.
    pub fn table1(n1: usize, n2: usize, seed: u64) -> Self {
        let p = 1000;
        let model = SequenceModel {
            null: Dist::standard_folded(),
            alt: AltModel::Heterogeneous {
                mu_mean: 2.5,
                mu_sd: 1.0,
                var_shape: 2.0,
                var_scale: 1.0,
            },
        };
        Self {
            label: format!("({n1},{n2})"),
            p,
            replicates: 400,
            alpha: 0.05,
            hypothesis: Hypothesis::Null,
            counts: SignalCounts { n1, n2, n12: 0 },
            first: model,
            second: model,
            noise: Noise::Independent,
            methods: vec![Method::Dhat, Method::MaxTest, Method::Spearman],
            permutation: PermutationConfig::new(200, PermutationScheme::FullShuffle, derive_seed(seed, 10), TruncationConfig::full(p)),
            hc_null_draws: 200,
            seed,
            timing: false,
        }
    }

    /// Single-sequence signal setting at `p = 1e5`: `t1` signals at
    /// `|N(sqrt((2 beta1 - 1) ln p), 1)|` with sparsity `beta1`, `t2`
    /// signals at `|N(sqrt(2 ln p), 1)|` with sparsity 1/2, and dependence
    /// exponent `beta1 + 0.01`.
    pub fn table3(beta1: f64, hypothesis: Hypothesis, seed: u64) -> Result<Self> {
        let p = 100_000;
        let beta = beta1.max(0.5) + 0.01;
        let cal = calibrate(p, beta, beta1, 0.5)?;
        let lp = (p as f64).ln();
        let model = |mu: f64| SequenceModel {
            null: Dist::standard_folded(),
            alt: AltModel::Common(Dist::FoldedNormal { mu, sigma: 1.0 }),
        };
        Ok(Self {
            label: format!("beta1={beta1}"),
            p,
            replicates: 400,
            alpha: 0.05,
            hypothesis,
            counts: SignalCounts {
                n1: cal.n1,
                n2: cal.n2,
                n12: cal.n12,
            },
            first: model(((2.0 * beta1 - 1.0) * lp).sqrt()),
            second: model((2.0 * lp).sqrt()),
            noise: Noise::Independent,
            methods: vec![Method::Dhat, Method::MaxTest, Method::Spearman, Method::HigherCriticism],
            permutation: PermutationConfig::new(
                200,
                PermutationScheme::FullShuffle,
                derive_seed(seed, 10),
                TruncationConfig::default_for(p),
            ),
            hc_null_draws: 200,
            seed,
            timing: false,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(Error::InvalidConfig("replicate count must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!("alpha = {} must lie in (0, 1)", self.alpha)));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("no methods requested".into()));
        }
        if self.methods.contains(&Method::HigherCriticism) && self.hc_null_draws < 1 {
            return Err(Error::InvalidConfig("higher criticism needs at least one null draw".into()));
        }
        self.noise.validate()?;
        self.permutation.validate(self.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    pub rejections: usize,
    pub replicates: usize,
    /// `rejections / replicates`.
    pub rate: f64,
    /// Monte Carlo standard error `sqrt(rate (1 - rate) / R)`.
    pub mc_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Realized number of features non-null in both sequences.
    pub overlap: usize,
    pub outcomes: Vec<MethodOutcome>,
    pub elapsed_ms: Option<f64>,
    pub ms_per_replicate: Option<f64>,
}

impl ExperimentReport {
    pub fn outcome(&self, method: Method) -> Option<&MethodOutcome> {
        self.outcomes.iter().find(|o| o.method == method)
    }

    pub fn rate(&self, method: Method) -> Option<f64> {
        self.outcome(method).map(|o| o.rate)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Higher criticism of `t1` from two-sided normal p-values.
fn hc_of_first(pairs: &PairedStatistics) -> Result<f64> {
    let pv: Vec<f64> = pairs.t1().iter().map(|&t| normal::two_sided_pvalue(t)).collect();
    Ok(hc_stat(&pv)?.value)
}

/// Monte Carlo p-value of `observed` against fresh null realizations drawn
/// for this replicate only.
fn hc_pvalue(observed: f64, p: usize, draws: usize, seed: u64) -> f64 {
    let mut buf = Vec::with_capacity(p);
    let exceed = (0..draws as u64)
        .filter(|&d| hc_null_draw(&mut stream_rng(seed, d), p, &mut buf) >= observed)
        .count();
    permutation_p_value(exceed, draws)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let c = cfg.counts;
    let assign = assign_latent(cfg.p, c.n1, c.n2, c.n12, cfg.hypothesis, derive_seed(cfg.seed, ASSIGN))?;
    let params_seed = derive_seed(cfg.seed, PARAMS);
    let spec = MixtureSpec {
        first: cfg.first.realize(cfg.p, derive_seed(params_seed, 0))?,
        second: cfg.second.realize(cfg.p, derive_seed(params_seed, 1))?,
    };
    spec.validate(cfg.p)?;
    let hc_seed = derive_seed(cfg.seed, HC_NULL);

    let kinds: Vec<StatisticKind> = cfg
        .methods
        .iter()
        .filter_map(|m| match m {
            Method::Dhat => Some(StatisticKind::Dhat),
            Method::MaxTest => Some(StatisticKind::MaxTest),
            _ => None,
        })
        .collect();
    let data_seed = derive_seed(cfg.seed, DATA);

    let decisions: Vec<Vec<bool>> = (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let pairs = sample_pairs_with(&assign, &spec, cfg.noise, derive_seed(data_seed, r))?;
            let perm_cfg = PermutationConfig {
                seed: derive_seed(cfg.permutation.seed, r),
                keep_replicates: false,
                ..cfg.permutation
            };
            let permuted = match kinds.is_empty() {
                true => Vec::new(),
                false => permutation_pvalues(&pairs, &perm_cfg, &kinds)?,
            };
            let mut permuted = permuted.into_iter();
            cfg.methods
                .iter()
                .map(|m| {
                    let p_value = match m {
                        Method::Dhat | Method::MaxTest => permuted.next().expect("one result per kind").p_value,
                        Method::Spearman => spearman_test(&pairs)?.p_value,
                        Method::HigherCriticism => {
                            let obs = hc_of_first(&pairs)?;
                            hc_pvalue(obs, cfg.p, cfg.hc_null_draws, derive_seed(hc_seed, r))
                        }
                    };
                    Ok(p_value <= cfg.alpha)
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let outcomes = cfg
        .methods
        .iter()
        .enumerate()
        .map(|(i, &method)| {
            let rejections = decisions.iter().filter(|d| d[i]).count();
            let rate = rejections as f64 / cfg.replicates as f64;
            MethodOutcome {
                method,
                rejections,
                replicates: cfg.replicates,
                rate,
                mc_se: (rate * (1.0 - rate) / cfg.replicates as f64).sqrt(),
            }
        })
        .collect();
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    Ok(ExperimentReport {
        config: cfg.clone(),
        overlap: assign.overlap(),
        outcomes,
        elapsed_ms: cfg.timing.then_some(elapsed),
        ms_per_replicate: cfg.timing.then_some(elapsed / cfg.replicates as f64),
    })
}

/// Rejection rates as a method-by-setting table, one column per report.
pub fn write_reports_csv<W: Write>(out: W, reports: &[ExperimentReport]) -> Result<()> {
    let mut methods: Vec<Method> = Vec::new();
    for r in reports {
        for o in &r.outcomes {
            if !methods.contains(&o.method) {
                methods.push(o.method);
            }
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["method".to_string()];
    header.extend(reports.iter().map(|r| r.config.label.clone()));
    w.write_record(&header).map_err(csv_err)?;
    for m in methods {
        let mut row = vec![m.name().to_string()];
        row.extend(reports.iter().map(|r| r.rate(m).map_or(String::new(), |v| v.to_string())));
        w.write_record(&row).map_err(csv_err)?;
    }
    Ok(w.flush()?)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
