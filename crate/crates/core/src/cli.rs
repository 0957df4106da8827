//! Command-line front end: `detect`, `simulate`, `boundary` and `bench`.
//!
//! Exit codes follow `sysexits`: 0 success, 2 usage, 65 malformed input,
//! 66 missing file, 70 internal error.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::boundary::{boundary_curve, write_boundary_csv, SolverOptions};
use crate::empirical::{dstat_fast, preprocess, PairedStatistics, TruncationConfig};
use crate::error::Error;
use crate::inference::{
    adaptive_test, asymptotic_pvalue, permutation_pvalue, PermutationConfig, PermutationScheme, StatisticKind,
};
use crate::rng::stream_rng;
use crate::simulation::{run_experiment, write_reports_csv, ExperimentConfig, Hypothesis, Method, Noise};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATAERR: i32 = 65;
pub const EXIT_NOINPUT: i32 = 66;
pub const EXIT_SOFTWARE: i32 = 70;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DATAERR,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_SOFTWARE,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooFewPoints { .. }
            | Error::LengthMismatch { .. }
            | Error::NonFiniteValue { .. }
            | Error::DegenerateInput(_) => EXIT_DATAERR,
            Error::InvalidTruncation(_) | Error::InvalidConfig(_) | Error::InvalidCalibration(_) => EXIT_USAGE,
            _ => EXIT_SOFTWARE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::internal(format!("i/o error: {e}"))
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "simsig", version, about = "Excess simultaneous signal in paired test statistics")]
pub struct CliInvocation {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Statistic and p-values for a TSV of paired statistics.
    Detect(DetectArgs),
    /// Fixed-effect simulation experiment.
    Simulate(SimulateArgs),
    /// Detection boundary curve as CSV.
    Boundary(BoundaryArgs),
    /// Time the grid search on synthetic data.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    None,
    /// `-log10(q)` of p-values in `(0, 1]`.
    Neglog10,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Shuffle,
    Cyclic,
}

impl From<SchemeArg> for PermutationScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Shuffle => PermutationScheme::FullShuffle,
            SchemeArg::Cyclic => PermutationScheme::CyclicShift,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    /// Two tab-separated columns `t1`, `t2`; an optional header line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "none")]
    pub transform: Transform,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub perms: u64,
    #[arg(long, value_enum, default_value = "shuffle")]
    pub scheme: SchemeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Top distinct `t1` values searched [default: 1000, capped at p].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub m1: Option<u64>,
    /// Top distinct `t2` values searched [default: 1000, capped at p].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub m2: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report wall-clock time; output is then no longer reproducible.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Table1,
    Table3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HypothesisArg {
    Null,
    Alt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub preset: Preset,
    /// Signals in the first sequence (table1).
    #[arg(long, default_value_t = 5)]
    pub n1: usize,
    /// Signals in the second sequence (table1).
    #[arg(long, default_value_t = 5)]
    pub n2: usize,
    /// Simultaneous signals under the alternative (table1).
    #[arg(long, default_value_t = 0)]
    pub n12: usize,
    /// Sparsity exponent of the first sequence (table3).
    #[arg(long, default_value_t = 0.6)]
    pub beta1: f64,
    /// Defaults to null for table1 and alt for table3.
    #[arg(long, value_enum)]
    pub hypothesis: Option<HypothesisArg>,
    #[arg(long, default_value_t = 400, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub perms: u64,
    #[arg(long, value_enum, default_value = "shuffle")]
    pub scheme: SchemeArg,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Lag-one correlation of AR(1) noise within each sequence.
    #[arg(long)]
    pub block_rho: Option<f64>,
    /// Comma-separated subset of dhat, max, spearman, hc.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BoundaryArgs {
    /// Comma-separated values; the curve covers every combination.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub beta1: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub beta2: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.25")]
    pub r1: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.25")]
    pub r2: Vec<f64>,
    /// Grid points per axis.
    #[arg(long, default_value_t = 512, value_parser = clap::value_parser!(u64).range(8..))]
    pub res: u64,
    /// Bisection tolerance on beta.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(2..))]
    pub p: u64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub m: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parses `argv` (including the program name) and checks flag ranges and
/// input paths.
pub fn parse_args<I, T>(argv: I) -> Result<CliInvocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let inv = CliInvocation::try_parse_from(argv).map_err(|e| CliError {
        code: if e.use_stderr() { EXIT_USAGE } else { EXIT_OK },
        message: e.render().to_string(),
    })?;
    validate(&inv)?;
    Ok(inv)
}

fn validate(inv: &CliInvocation) -> Result<(), CliError> {
    match &inv.command {
        Command::Detect(a) => {
            if !a.input.is_file() {
                return Err(CliError {
                    code: EXIT_NOINPUT,
                    message: format!("--input: cannot open {}", a.input.display()),
                });
            }
        }
        Command::Simulate(a) => {
            if !(a.alpha > 0.0 && a.alpha < 1.0) {
                return Err(CliError::usage(format!("--alpha {} must lie in (0, 1)", a.alpha)));
            }
            if let Some(rho) = a.block_rho {
                if !(0.0..1.0).contains(&rho) {
                    return Err(CliError::usage(format!("--block-rho {rho} must lie in [0, 1)")));
                }
            }
            if a.preset == Preset::Table3 && !(0.5..1.0).contains(&a.beta1) {
                return Err(CliError::usage(format!("--beta1 {} must lie in [0.5, 1)", a.beta1)));
            }
            for m in a.methods.iter().flatten() {
                m.parse::<Method>()
                    .map_err(|_| CliError::usage(format!("--methods: unknown method {m:?}")))?;
            }
        }
        Command::Boundary(a) => {
            for (flag, values) in [("--beta1", &a.beta1), ("--beta2", &a.beta2)] {
                if let Some(b) = values.iter().find(|b| !(0.5..=1.0).contains(*b)) {
                    return Err(CliError::usage(format!("{flag} {b} must lie in [0.5, 1]")));
                }
            }
            for (flag, values) in [("--r1", &a.r1), ("--r2", &a.r2)] {
                if let Some(r) = values.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
                    return Err(CliError::usage(format!("{flag} {r} must be finite and nonnegative")));
                }
            }
            if !(a.tol > 0.0 && a.tol < 0.5) {
                return Err(CliError::usage(format!("--tol {} must lie in (0, 0.5)", a.tol)));
            }
        }
        Command::Bench(_) => {}
    }
    Ok(())
}

/// Reads `t1<TAB>t2` rows. A first row whose first field is not numeric is
/// a header. Errors carry the 1-based line number.
pub fn read_pairs_tsv<R: Read>(input: R, transform: Transform) -> Result<PairedStatistics, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let (mut t1, mut t2) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::data(format!("malformed input: {e}")))?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if i == 0 && record.get(0).is_some_and(|f| f.trim().parse::<f64>().is_err()) {
            continue;
        }
        if record.len() != 2 {
            return Err(CliError::data(format!(
                "line {line}: expected 2 tab-separated fields, found {}",
                record.len()
            )));
        }
        let value = |k: usize| -> Result<f64, CliError> {
            let field = record[k].trim();
            let v: f64 = field
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| CliError::data(format!("line {line}: column {} is not a finite number: {field:?}", k + 1)))?;
            match transform {
                Transform::None => Ok(v),
                Transform::Neglog10 if v > 0.0 && v <= 1.0 => Ok(-v.log10()),
                Transform::Neglog10 => Err(CliError::data(format!(
                    "line {line}: column {} value {v} is not a p-value in (0, 1]",
                    k + 1
                ))),
            }
        };
        t1.push(value(0)?);
        t2.push(value(1)?);
    }
    Ok(PairedStatistics::new(t1, t2)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectReport {
    pub statistic: f64,
    pub t1_star: f64,
    pub t2_star: f64,
    pub p_value: f64,
    /// `None` when `p < 3`.
    pub p_value_asymptotic: Option<f64>,
    /// `None` when `p < 16`.
    pub adaptive_reject: Option<bool>,
    pub perms: u64,
    pub scheme: String,
    pub seed: u64,
    pub m1: usize,
    pub m2: usize,
    pub p: usize,
    /// Only with `--timing`.
    pub elapsed_ms: Option<f64>,
}

pub fn detect(pairs: &PairedStatistics, args: &DetectArgs) -> Result<DetectReport, CliError> {
    let start = Instant::now();
    let p = pairs.len();
    let resolve = |flag: &str, m: Option<u64>| match m {
        None => Ok(TruncationConfig::DEFAULT_CAP.min(p)),
        Some(m) => usize::try_from(m)
            .ok()
            .filter(|&m| m <= p)
            .ok_or_else(|| CliError::usage(format!("{flag} {m} exceeds the number of rows p = {p}"))),
    };
    let trunc = TruncationConfig::new(resolve("--m1", args.m1)?, resolve("--m2", args.m2)?, p)?;
    let perms = usize::try_from(args.perms).map_err(|_| CliError::usage("--perms is too large"))?;
    let cfg = PermutationConfig::new(perms, args.scheme.into(), args.seed, trunc);
    let res = permutation_pvalue(pairs, &cfg, StatisticKind::Dhat)?;
    let observed = res.observed.expect("grid statistic has a maximizer");
    Ok(DetectReport {
        statistic: observed.statistic,
        t1_star: observed.argmax_thresholds.0,
        t2_star: observed.argmax_thresholds.1,
        p_value: res.p_value,
        p_value_asymptotic: asymptotic_pvalue(observed.statistic, p).ok(),
        adaptive_reject: adaptive_test(observed.statistic, p).ok(),
        perms: args.perms,
        scheme: res.scheme.to_string(),
        seed: args.seed,
        m1: trunc.m1,
        m2: trunc.m2,
        p,
        elapsed_ms: args.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

fn simulate_config(a: &SimulateArgs) -> Result<ExperimentConfig, CliError> {
    let hypothesis = match a.hypothesis {
        Some(HypothesisArg::Null) => Hypothesis::Null,
        Some(HypothesisArg::Alt) => Hypothesis::Alternative,
        None if a.preset == Preset::Table3 => Hypothesis::Alternative,
        None => Hypothesis::Null,
    };
    let mut cfg = match a.preset {
        Preset::Table1 => {
            let mut c = ExperimentConfig::table1(a.n1, a.n2, a.seed);
            c.counts.n12 = a.n12;
            c
        }
        Preset::Table3 => ExperimentConfig::table3(a.beta1, hypothesis, a.seed)?,
    };
    cfg.hypothesis = hypothesis;
    cfg.replicates = a.reps as usize;
    cfg.alpha = a.alpha;
    cfg.permutation.replicates = a.perms as usize;
    cfg.permutation.scheme = a.scheme.into();
    cfg.timing = a.timing;
    if let Some(rho) = a.block_rho {
        cfg.noise = Noise::Ar1 { rho };
    }
    if let Some(methods) = &a.methods {
        cfg.methods = methods.iter().map(|m| m.parse()).collect::<Result<_, _>>()?;
    }
    Ok(cfg)
}

#[derive(Debug, Serialize)]
struct BenchReport {
    p: usize,
    m: usize,
    statistic: f64,
    argmax_cell: (usize, usize),
    cells_evaluated: u64,
    preprocess_ms: f64,
    search_ms: f64,
}

fn bench(a: &BenchArgs) -> Result<BenchReport, CliError> {
    let p = usize::try_from(a.p).map_err(|_| CliError::usage("--p is too large"))?;
    let m = usize::try_from(a.m).map_err(|_| CliError::usage("--m is too large"))?.min(p);
    let draw = |stream| {
        let mut rng = stream_rng(a.seed, stream);
        (0..p).map(|_| rng.sample::<f64, _>(StandardNormal).abs()).collect::<Vec<f64>>()
    };
    let pairs = PairedStatistics::new(draw(0), draw(1))?;
    let start = Instant::now();
    let ranked = preprocess(&pairs)?;
    let preprocess_ms = start.elapsed().as_secs_f64() * 1e3;
    let start = Instant::now();
    let res = dstat_fast(&ranked, TruncationConfig::new(m, m, p)?)?;
    Ok(BenchReport {
        p,
        m,
        statistic: res.statistic,
        argmax_cell: res.argmax_cell,
        cells_evaluated: res.cells_evaluated,
        preprocess_ms,
        search_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn open_output<'a>(out: &Option<PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| CliError {
            code: EXIT_SOFTWARE,
            message: format!("--out: cannot create {}: {e}", path.display()),
        })?)),
        None => Box::new(stdout),
    })
}

fn write_json<T: Serialize>(mut w: impl Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::internal(e.to_string()))?;
    writeln!(w)?;
    Ok(w.flush()?)
}

fn read_input(path: &Path, transform: Transform) -> Result<PairedStatistics, CliError> {
    let file = File::open(path).map_err(|e| CliError {
        code: EXIT_NOINPUT,
        message: format!("--input: cannot open {}: {e}", path.display()),
    })?;
    read_pairs_tsv(std::io::BufReader::new(file), transform)
}

/// Executes a parsed invocation, writing results to `stdout` unless `--out`
/// is given.
pub fn run(inv: &CliInvocation, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &inv.command {
        Command::Detect(a) => {
            let pairs = read_input(&a.input, a.transform)?;
            let report = detect(&pairs, a)?;
            write_json(open_output(&a.out, stdout)?, &report)
        }
        Command::Simulate(a) => {
            let report = run_experiment(&simulate_config(a)?)?;
            let mut out = open_output(&a.out, stdout)?;
            match a.format {
                Format::Json => write_json(out, &report),
                Format::Csv => {
                    write_reports_csv(&mut out, std::slice::from_ref(&report))?;
                    Ok(out.flush()?)
                }
            }
        }
        Command::Boundary(a) => {
            let mut grid = Vec::new();
            for &b1 in &a.beta1 {
                for &b2 in &a.beta2 {
                    for &r1 in &a.r1 {
                        for &r2 in &a.r2 {
                            grid.push((b1, b2, r1, r2));
                        }
                    }
                }
            }
            let opts = SolverOptions::with_res(a.res as usize);
            let points = boundary_curve(&grid, &opts, a.tol)?;
            let mut out = open_output(&a.out, stdout)?;
            write_boundary_csv(&mut out, &points, &opts, a.tol)?;
            Ok(out.flush()?)
        }
        Command::Bench(a) => write_json(open_output(&None, stdout)?, &bench(a)?),
    }
}

/// Parses, runs and reports errors on stderr; returns the exit status.
pub fn main_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = parse_args(argv).and_then(|inv| run(&inv, stdout));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) if e.code == EXIT_OK => {
            let _ = write!(stdout, "{}", e.message);
            EXIT_OK
        }
        Err(e) => {
            let msg = e.message.trim_end();
            let _ = writeln!(stderr, "error: {}", msg.strip_prefix("error: ").unwrap_or(msg));
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(args: &str) -> Result<CliInvocation, CliError> {
        parse_args(std::iter::once("simsig").chain(args.split_whitespace()))
    }

    #[test]
    fn detect_defaults() {
        let file = tempfile::NamedTempFile::new().unwrap();
        let path = file.path().to_str().unwrap();
        let inv = parse(&format!("detect --input {path} --perms 200 --seed 7")).unwrap();
        let Command::Detect(a) = inv.command else { panic!() };
        assert_eq!((a.m1, a.m2, a.perms, a.seed), (None, None, 200, 7));
        assert_eq!(a.scheme, SchemeArg::Shuffle);
    }

    #[test]
    fn usage_errors() {
        let file = tempfile::NamedTempFile::new().unwrap();
        let path = file.path().to_str().unwrap();
        let e = parse(&format!("detect --input {path} --perms 0")).unwrap_err();
        assert_eq!(e.code, EXIT_USAGE);
        assert!(e.message.contains("--perms"));
        let e = parse("boundary --beta1 0.4").unwrap_err();
        assert_eq!(e.code, EXIT_USAGE);
        assert!(e.message.contains("--beta1"));
        assert_eq!(parse("frobnicate").unwrap_err().code, EXIT_USAGE);
        assert_eq!(parse("detect --input /no/such/file.tsv").unwrap_err().code, EXIT_NOINPUT);
    }

    #[test]
    fn tsv_with_header_and_transform() {
        let text = "t1\tt2\n0.01\t0.5\n1\t0.001\n";
        let pairs = read_pairs_tsv(Cursor::new(text), Transform::Neglog10).unwrap();
        assert_eq!(pairs.t1(), &[2.0, 0.0]);
        assert_eq!(pairs.t2()[1], 3.0);
    }

    #[test]
    fn tsv_errors_name_the_line() {
        let e = read_pairs_tsv(Cursor::new("1\t2\n3\tx\n"), Transform::None).unwrap_err();
        assert_eq!(e.code, EXIT_DATAERR);
        assert!(e.message.contains("line 2"), "{}", e.message);
        let e = read_pairs_tsv(Cursor::new("a\tb\n1\t2\n3\n"), Transform::None).unwrap_err();
        assert!(e.message.contains("line 3"), "{}", e.message);
        let e = read_pairs_tsv(Cursor::new("0.5\t1.5\n"), Transform::Neglog10).unwrap_err();
        assert!(e.message.contains("line 1"), "{}", e.message);
        let e = read_pairs_tsv(Cursor::new("1\t\n"), Transform::None).unwrap_err();
        assert_eq!(e.code, EXIT_DATAERR);
    }
}
