//! With known marginal survival functions the supremum runs over all
//! threshold pairs, not just the empirical grid.

use simsig::{dstat_oracle, preprocess, dstat_fast, PairedStatistics, TruncationConfig};

fn main() {
    // two uniform sequences sharing their top three values
    let p = 12;
    let t1: Vec<f64> = (0..p).map(|j| (j as f64 + 0.5) / p as f64).collect();
    let mut t2 = t1.clone();
    t2[..p - 3].reverse();
    let pairs = PairedStatistics::new(t1, t2).unwrap();

    let uniform = |t: f64| (1.0 - t).clamp(0.0, 1.0);
    let oracle = dstat_oracle(&pairs, uniform, uniform).unwrap();
    let empirical = dstat_fast(&preprocess(&pairs).unwrap(), TruncationConfig::full(p)).unwrap();

    println!("known marginals: D = {:.4} at {:?}", oracle.statistic, oracle.argmax_thresholds);
    println!("empirical:       D = {:.4} at {:?}", empirical.statistic, empirical.argmax_thresholds);

    // a single concordant pair of two
    let two = PairedStatistics::new(vec![0.2, 0.7], vec![0.1, 0.9]).unwrap();
    let d = dstat_fast(&preprocess(&two).unwrap(), TruncationConfig::full(2)).unwrap();
    println!("p=2 concordant: D = {:.12} (sqrt(2/3) = {:.12})", d.statistic, (2.0f64 / 3.0).sqrt());
}
