//! Dependence statistic and permutation p-value for a TSV of paired
//! statistics, or for a synthetic sample when no path is given.
//!
//!     cargo run --release --example detect_pairs -- pairs.tsv

use simsig::cli::{read_pairs_tsv, Transform};
use simsig::inference::{
    adaptive_test, asymptotic_pvalue, permutation_pvalue, PermutationConfig, PermutationScheme, StatisticKind,
};
use simsig::simulation::{assign_latent, sample_pairs, AltSpec, Dist, Hypothesis, MixtureSpec, SequenceSpec};
use simsig::{PairedStatistics, TruncationConfig};

fn synthetic() -> PairedStatistics {
    // 20 shared moderate signals among 5000 features
    let assign = assign_latent(5000, 40, 40, 20, Hypothesis::Alternative, 3).unwrap();
    let seq = SequenceSpec {
        null: Dist::standard_folded(),
        alt: AltSpec::Common(Dist::FoldedNormal { mu: 2.5, sigma: 1.0 }),
    };
    let spec = MixtureSpec {
        first: seq.clone(),
        second: seq,
    };
    sample_pairs(&assign, &spec, 11).unwrap()
}

fn main() {
    let pairs = match std::env::args().nth(1) {
        Some(path) => {
            let file = std::fs::File::open(&path).expect("readable input");
            read_pairs_tsv(file, Transform::None).unwrap_or_else(|e| panic!("{path}: {e}"))
        }
        None => synthetic(),
    };
    let p = pairs.len();

    let cfg = PermutationConfig::new(999, PermutationScheme::FullShuffle, 7, TruncationConfig::default_for(p));
    let res = permutation_pvalue(&pairs, &cfg, StatisticKind::Dhat).unwrap();
    let obs = res.observed.unwrap();

    println!("p = {p}");
    println!("D = {:.4} at thresholds ({:.4}, {:.4})", obs.statistic, obs.argmax_thresholds.0, obs.argmax_thresholds.1);
    println!("cells searched: {}", obs.cells_evaluated);
    println!("permutation p-value ({} shuffles): {:.4}", res.replicates, res.p_value);
    if let Ok(q) = asymptotic_pvalue(obs.statistic, p) {
        println!("asymptotic tail (advisory): {q:.4}");
    }
    if let Ok(reject) = adaptive_test(obs.statistic, p) {
        println!("adaptive threshold test rejects: {reject}");
    }
}
