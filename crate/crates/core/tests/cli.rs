use std::path::Path;
use std::process::{Command, Output};

fn simsig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simsig")).args(args).output().unwrap()
}

fn write_tsv(dir: &Path, body: &str) -> String {
    let path = dir.join("pairs.tsv");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn sample_tsv() -> String {
    let mut s = String::from("t1\tt2\n");
    for j in 0..60 {
        let t1 = ((j * 37) % 61) as f64 / 7.0;
        let t2 = if j < 6 { 20.0 + j as f64 } else { ((j * 11) % 59) as f64 / 5.0 };
        let t1 = if j < 6 { 30.0 - j as f64 } else { t1 };
        s.push_str(&format!("{t1}\t{t2}\n"));
    }
    s
}

#[test]
fn detect_report_keys_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_tsv(dir.path(), &sample_tsv());
    let args = ["detect", "--input", &input, "--perms", "499", "--seed", "9"];
    let a = simsig(&args);
    let b = simsig(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);

    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in [
        "statistic",
        "t1_star",
        "t2_star",
        "p_value",
        "p_value_asymptotic",
        "adaptive_reject",
        "perms",
        "scheme",
        "seed",
        "m1",
        "m2",
        "p",
        "elapsed_ms",
    ] {
        assert!(keys.contains(&k), "missing {k} in {keys:?}");
    }
    assert_eq!(v["p"], 60);
    assert_eq!(v["m1"], 60);
    assert!(v["elapsed_ms"].is_null());
    // six planted top pairs; at p = 60 a single chance top-top match
    // already reaches the statistic, about 1 in 60 shuffles
    assert!(v["p_value"].as_f64().unwrap() < 0.05);
}

#[test]
fn neglog10_transform_matches_manual() {
    let dir = tempfile::tempdir().unwrap();
    let raw = "0.5\t0.01\n0.001\t0.2\n0.03\t0.0004\n0.9\t0.7\n0.2\t0.05\n";
    let manual: String = raw
        .lines()
        .map(|l| {
            let v: Vec<f64> = l.split('\t').map(|x| -x.parse::<f64>().unwrap().log10()).collect();
            format!("{}\t{}\n", v[0], v[1])
        })
        .collect();
    let a = write_tsv(dir.path(), raw);
    let other = dir.path().join("manual.tsv");
    std::fs::write(&other, manual).unwrap();
    let common = ["--perms", "50", "--seed", "1"];
    let x = simsig(&[&["detect", "--input", &a, "--transform", "neglog10"][..], &common].concat());
    let y = simsig(&[&["detect", "--input", other.to_str().unwrap()][..], &common].concat());
    assert_eq!(x.status.code(), Some(0));
    let (x, y): (serde_json::Value, serde_json::Value) =
        (serde_json::from_slice(&x.stdout).unwrap(), serde_json::from_slice(&y.stdout).unwrap());
    assert!((x["statistic"].as_f64().unwrap() - y["statistic"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(simsig(&["detect", "--input", "/nonexistent/pairs.tsv"]).status.code(), Some(66));
    assert_eq!(simsig(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(simsig(&["detect"]).status.code(), Some(2));

    let bad = write_tsv(dir.path(), "1\t2\n3\tabc\n");
    let out = simsig(&["detect", "--input", &bad]);
    assert_eq!(out.status.code(), Some(65));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let good = write_tsv(dir.path(), &sample_tsv());
    assert_eq!(simsig(&["detect", "--input", &good, "--m1", "61"]).status.code(), Some(2));
    assert_eq!(simsig(&["detect", "--input", &good, "--perms", "0"]).status.code(), Some(2));
    assert_eq!(simsig(&["--help"]).status.code(), Some(0));
}

#[test]
fn boundary_csv_layout() {
    let out = simsig(&["boundary", "--r1", "0.25,1.5", "--r2", "0.25", "--res", "128"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with('#'));
    assert_eq!(lines.next().unwrap(), "beta1,beta2,r1,r2,beta_star");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 2);
    assert!((rows[0][4] - 0.9142).abs() < 2e-3);
}

#[test]
fn simulate_csv_and_json_agree() {
    let base = ["simulate", "--preset", "table1", "--reps", "4", "--perms", "20", "--seed", "3"];
    let json = simsig(&base);
    let csv = simsig(&[&base[..], &["--format", "csv"]].concat());
    assert_eq!(json.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let text = String::from_utf8(csv.stdout).unwrap();
    let dhat = text.lines().find(|l| l.starts_with("dhat,")).unwrap();
    let rate: f64 = dhat.split(',').nth(1).unwrap().parse().unwrap();
    let outcome = v["outcomes"].as_array().unwrap().iter().find(|o| o["method"] == "dhat").unwrap();
    assert_eq!(outcome["rate"].as_f64().unwrap(), rate);
}
