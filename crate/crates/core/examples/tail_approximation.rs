use simsig::boundary::tail_approx_check;

fn main() {
    for r in [0.0, 0.25, 1.0] {
        for e in [3, 6, 9, 12] {
            let p = 10u64.pow(e);
            let t = tail_approx_check(0.5, r, p).unwrap();
            println!(
                "r={r:.2} p=1e{e:<2} log_p F1(F0^-1(p^-x))={:+.4} v-(x)={:+.4} gap={:.4}",
                t.lhs_exponent,
                t.v_value,
                t.gap()
            );
        }
    }
}
