//! The sweep evaluator against cell-by-cell counting, then the sweep alone
//! at a larger size.

use std::time::Instant;

use rand::Rng;
use simsig::rng::stream_rng;
use simsig::{dstat_fast, dstat_naive, preprocess, PairedStatistics, TruncationConfig};

fn sample(p: usize, seed: u64, levels: u32) -> PairedStatistics {
    let mut rng = stream_rng(seed, 0);
    let mut col = || (0..p).map(|_| rng.random_range(0..levels) as f64).collect::<Vec<_>>();
    let t1 = col();
    let t2 = col();
    PairedStatistics::new(t1, t2).unwrap()
}

fn main() {
    for (i, p) in [50, 120, 300].into_iter().enumerate() {
        let pairs = sample(p, i as u64, 40 + 20 * i as u32);
        let ranked = preprocess(&pairs).unwrap();
        let trunc = TruncationConfig::new(p / 3, p / 2, p).unwrap();
        let a = dstat_naive(&ranked, trunc).unwrap();
        let b = dstat_fast(&ranked, trunc).unwrap();
        assert_eq!(a, b);
        println!("p={p:4} D={:.6} cell={:?} identical", a.statistic, a.argmax_cell);
    }

    let p = 1_000_000;
    let mut rng = stream_rng(1, 1);
    let t1: Vec<f64> = (0..p).map(|_| rng.random::<f64>()).collect();
    let t2: Vec<f64> = (0..p).map(|_| rng.random::<f64>()).collect();
    let pairs = PairedStatistics::new(t1, t2).unwrap();
    let start = Instant::now();
    let ranked = preprocess(&pairs).unwrap();
    let sorted = start.elapsed();
    let res = dstat_fast(&ranked, TruncationConfig::new(1000, 1000, p).unwrap()).unwrap();
    println!(
        "p={p} m=1000: D={:.4}, sort {:?}, total {:?}",
        res.statistic,
        sorted,
        start.elapsed()
    );
}
