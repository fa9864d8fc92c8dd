//! Command-line front end.
//!
//! Every subcommand produces one [`OutputRecord`], printed as CSV or JSON on
//! stdout (or to `--out`). Diagnostics go to stderr. Exit codes: 0 success,
//! 1 verification failure or I/O error, 2 argument errors, 3 resource-budget
//! or overflow errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::arith::sieve_primes;
use crate::avg::{
    average_log_inv_density, lemma3_error_integral, lemma3_lhs, lemma3_main_term, landau_sum,
    s1_partial_summation_bound, s1_prime_power_excess, theorem1_double_sum, y_condition_holds,
    AverageConfig, LandauConstants, PsiTable, DEFAULT_PRIME_CORRECTION_BOUND,
};
use crate::error::Error;
use crate::global::{bound, prime_cutoff, BoundMode, GlobalBoundConfig, DEFAULT_CUTOFF_DIVISOR};
use crate::local::{local_density, parse_coefficients, FormSpec};
use crate::scan::{density_report, ScanConfig};
use crate::verify::run_suite;

pub const SCHEMA_VERSION: &str = "1";

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "DIAGDENSITY_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "diagdensity",
    version,
    about = "Density bounds for integers represented by diagonal forms a1*x1^k + ... + as*xs^k",
    after_help = "CSV output: one header line and one line per row; when a command has \
                  summary quantities they follow after a blank line as a `quantity,value` \
                  table. Floats carry 12 significant digits; exact ratios are printed as \
                  num/den in *_exact columns."
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Coefficients a1,...,as of the form.
    #[arg(long, global = true, allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// Exponent k.
    #[arg(long, global = true)]
    k: Option<u32>,
    /// Number of variables s (taken from --coeffs when given).
    #[arg(long, global = true)]
    s: Option<u32>,
    #[arg(long = "prime-limit", global = true)]
    prime_limit: Option<u64>,
    /// Cutoff divisor R in Z = k^(1+1/(s-1))/R.
    #[arg(long = "R", global = true)]
    r: Option<f64>,
    /// Window [1, N] for `scan`.
    #[arg(long = "N", global = true)]
    n: Option<u64>,
    /// Box half-width for `scan`.
    #[arg(long = "B", global = true)]
    b: Option<u64>,
    /// X, or a comma-separated list of X values for `average` and `landau`.
    #[arg(long = "X", global = true, value_delimiter = ',')]
    x: Vec<f64>,
    #[arg(long = "Y", global = true)]
    y: Option<f64>,
    /// When set, Y = X^(1/(s-1+eta)).
    #[arg(long, global = true)]
    eta: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the data stream to PATH instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: $DIAGDENSITY_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized property checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Alpha,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Local density table: columns p, m, value_set_size, density, alpha,
    /// density_exact, alpha_capped, within_bound for every prime up to
    /// --prime-limit (default 100).
    Local,
    /// Global bound for one k: rows p, term for each contributing prime;
    /// summary log_inv_density_lower, density_upper, conditional_reference.
    /// Exact mode (the default when --coeffs is given) uses value sets;
    /// alpha mode uses the coset bound below Z. --R defaults to 4.
    Bound {
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Box search and residue sieve on [1, N]: rows n, witness; summary
    /// lower/upper densities and flags.
    Scan {
        /// Comma-separated primes for the residue sieve.
        #[arg(long = "sieve-primes", value_delimiter = ',')]
        sieve_primes: Vec<u64>,
    },
    /// Average of the per-k bound over 1 <= k < X for each X: columns X,
    /// average, reference, normalized, prime_limit. Alpha mode unless
    /// --coeffs is given. --R defaults to 1 and --prime-limit to
    /// ceil(X^(s/(s-1))).
    Average {
        /// Emit per-k rows (X, k, bound) instead of one row per X.
        #[arg(long = "per-k")]
        per_k: bool,
    },
    /// Sum of psi(mX; m, 1) over m < Y against its main term, the error
    /// integral, the prime double sum and the partial-summation bound:
    /// one row with columns X, Y, s, lhs, main_term, lhs_over_main,
    /// lhs_over_cl_xy, error_integral, error_over_xy_log2x, double_sum,
    /// s1_bound, prime_power_excess, y_condition.
    Lemma3,
    /// Partial sums of 1/phi(n) against the asymptotic prediction: columns
    /// x, partial_sum, prediction, error, offset.
    Landau,
    /// Runs the property suite: columns check, cases, violations, status.
    /// Exits 1 if any check fails.
    Verify,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_sig12(*v),
            Cell::Text(t) => t.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(i) => Value::from(i),
                Err(_) => Value::String(v.to_string()),
            },
            Cell::Float(v) => {
                let text = format_sig12(*v);
                text.parse::<f64>()
                    .ok()
                    .and_then(serde_json::Number::from_f64)
                    .map_or(Value::String(text), Value::Number)
            }
            Cell::Text(t) => Value::String(t.clone()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed,
/// exponent form outside `1e-5 <= |v| < 1e15`.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.11e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, v))
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// The machine-readable result of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    pub schema_version: String,
    pub command: String,
    pub inputs: Map<String, Value>,
    pub summary: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl OutputRecord {
    fn new(command: &str, inputs: Map<String, Value>, columns: &[&str]) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            inputs,
            summary: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn summarize(&mut self, label: &str, value: impl Into<Cell>) {
        self.summary.push((label.to_string(), value.into()));
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        if !self.summary.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "quantity,value");
            for (label, cell) in &self.summary {
                let _ = writeln!(out, "{},{}", label, cell.csv());
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut root = Map::new();
        root.insert("schema_version".into(), Value::from(self.schema_version.clone()));
        root.insert("command".into(), Value::from(self.command.clone()));
        root.insert("inputs".into(), Value::Object(self.inputs.clone()));
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.clone(), v.json()))
            .collect();
        root.insert("summary".into(), Value::Object(summary));
        root.insert(
            "columns".into(),
            Value::Array(self.columns.iter().cloned().map(Value::from).collect()),
        );
        let rows = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::json))
                        .collect(),
                )
            })
            .collect();
        root.insert("rows".into(), Value::Array(rows));
        let mut text = serde_json::to_string_pretty(&Value::Object(root)).expect("serializable");
        text.push('\n');
        text
    }
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
enum Failure {
    Domain(Error),
    Usage(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Domain(Error::Resource { .. } | Error::Overflow(_)) => EXIT_RESOURCE,
            Failure::Domain(_) | Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_FAILURE,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Domain(e) => e.to_string(),
            Failure::Usage(m) => m.clone(),
            Failure::Io(e) => format!("i/o error: {e}"),
        }
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

fn need<T>(value: Option<T>, flag: &str) -> CmdResult<T> {
    value.ok_or_else(|| Failure::Usage(format!("missing required flag {flag}")))
}

fn form_from(args: &GlobalArgs) -> CmdResult<FormSpec> {
    let coeffs = parse_coefficients(&need(args.coeffs.clone(), "--coeffs")?)?;
    let form = FormSpec::new(coeffs, need(args.k, "--k")?)?;
    if let Some(s) = args.s {
        if s as usize != form.s() {
            return Err(Failure::Usage(format!(
                "--s {s} disagrees with {} coefficients",
                form.s()
            )));
        }
    }
    Ok(form)
}

fn single_x(args: &GlobalArgs) -> CmdResult<f64> {
    match args.x.as_slice() {
        [x] => Ok(*x),
        [] => Err(Failure::Usage("missing required flag --X".into())),
        _ => Err(Failure::Usage("this command takes a single --X value".into())),
    }
}

fn integer_xs(args: &GlobalArgs) -> CmdResult<Vec<u64>> {
    args.x
        .iter()
        .map(|&x| {
            if x >= 1.0 && x.fract() == 0.0 && x < 1e15 {
                Ok(x as u64)
            } else {
                Err(Failure::Usage(format!("--X values must be positive integers, got {x}")))
            }
        })
        .collect()
}

/// Echo of the flags that determine the output. `--threads` and `--out`
/// are excluded so that reruns with different parallelism are identical.
fn echo_inputs(args: &GlobalArgs, extra: &[(&str, Value)]) -> Map<String, Value> {
    let mut m = Map::new();
    if let Some(c) = &args.coeffs {
        m.insert("coeffs".into(), Value::from(c.clone()));
    }
    let opt = |m: &mut Map<String, Value>, key: &str, v: Option<Value>| {
        if let Some(v) = v {
            m.insert(key.into(), v);
        }
    };
    opt(&mut m, "k", args.k.map(Value::from));
    opt(&mut m, "s", args.s.map(Value::from));
    opt(&mut m, "prime_limit", args.prime_limit.map(Value::from));
    opt(&mut m, "R", args.r.map(|v| Cell::Float(v).json()));
    opt(&mut m, "N", args.n.map(Value::from));
    opt(&mut m, "B", args.b.map(Value::from));
    if !args.x.is_empty() {
        m.insert(
            "X".into(),
            Value::Array(args.x.iter().map(|&v| Cell::Float(v).json()).collect()),
        );
    }
    opt(&mut m, "Y", args.y.map(|v| Cell::Float(v).json()));
    opt(&mut m, "eta", args.eta.map(|v| Cell::Float(v).json()));
    m.insert("seed".into(), Value::from(args.seed));
    for (k, v) in extra {
        m.insert((*k).into(), v.clone());
    }
    m
}

fn cmd_local(args: &GlobalArgs) -> CmdResult<OutputRecord> {
    let form = form_from(args)?;
    let limit = args.prime_limit.unwrap_or(100);
    let primes = sieve_primes(limit)?;
    let records = primes
        .primes()
        .par_iter()
        .map(|&p| local_density(&form, p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = OutputRecord::new(
        "local",
        echo_inputs(args, &[]),
        &[
            "p",
            "m",
            "value_set_size",
            "density",
            "alpha",
            "density_exact",
            "alpha_capped",
            "within_bound",
        ],
    );
    let s = form.s() as u32;
    for r in records {
        out.push_row(vec![
            r.prime.into(),
            r.coset_index.into(),
            r.value_set_size.into(),
            r.density.to_f64().into(),
            r.alpha.into(),
            r.density.to_string().into(),
            r.alpha_capped.into(),
            r.within_alpha_bound(s).into(),
        ]);
    }
    Ok(out)
}

fn cmd_bound(args: &GlobalArgs, mode: Option<ModeArg>) -> CmdResult<OutputRecord> {
    let k = need(args.k, "--k")?;
    let form = match &args.coeffs {
        Some(_) => Some(form_from(args)?),
        None => None,
    };
    let s = match (&form, args.s) {
        (Some(f), _) => f.s() as u32,
        (None, Some(s)) => s,
        (None, None) => return Err(Failure::Usage("--s or --coeffs is required".into())),
    };
    let mode = match (mode, &form) {
        (Some(ModeArg::Exact), None) => {
            return Err(Failure::Usage("exact mode needs --coeffs".into()))
        }
        (Some(ModeArg::Exact), Some(_)) | (None, Some(_)) => BoundMode::Exact,
        (Some(ModeArg::Alpha), _) | (None, None) => BoundMode::Alpha,
    };
    let r = args.r.unwrap_or(DEFAULT_CUTOFF_DIVISOR);
    let config = GlobalBoundConfig::new(r, args.prime_limit.unwrap_or(1_000), mode)?;
    let primes = sieve_primes(config.prime_limit)?;
    let report = bound(k as u64, s, form.as_ref(), &config, &primes)?;

    let mode_name = match mode {
        BoundMode::Exact => "exact",
        BoundMode::Alpha => "alpha",
    };
    let mut out = OutputRecord::new(
        "bound",
        echo_inputs(args, &[("mode", Value::from(mode_name))]),
        &["p", "term"],
    );
    for c in &report.contributing {
        out.push_row(vec![c.prime.into(), c.term.into()]);
    }
    out.summarize("k", report.k);
    out.summarize("s", report.s);
    out.summarize("mode", mode_name);
    out.summarize("log_inv_density_lower", report.log_inv_density_lower);
    out.summarize("density_upper", report.density_upper);
    out.summarize(
        "conditional_reference",
        report.conditional_reference.unwrap_or(f64::NAN),
    );
    out.summarize("cutoff_z", prime_cutoff(k as u64, s, r));
    out.summarize("contributing_primes", report.contributing.len() as u64);
    out.summarize("density_is_zero", report.density_is_zero);
    Ok(out)
}

fn cmd_scan(args: &GlobalArgs, sieve_primes: &[u64]) -> CmdResult<OutputRecord> {
    let form = form_from(args)?;
    let config = ScanConfig::new(
        need(args.n, "--N")?,
        need(args.b, "--B")?,
        sieve_primes.to_vec(),
    )?;
    let report = density_report(&form, &config)?;
    let list = sieve_primes
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(";");
    let mut out = OutputRecord::new(
        "scan",
        echo_inputs(args, &[("sieve_primes", Value::from(list))]),
        &["n", "witness"],
    );
    for (&n, x) in &report.witnesses {
        let w = x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";");
        out.push_row(vec![n.into(), w.into()]);
    }
    out.summarize("represented_count", report.represented.len() as u64);
    out.summarize("lower_density", report.lower_density.to_f64());
    out.summarize("lower_density_exact", report.lower_density.to_string());
    out.summarize("sieve_admissible_count", report.sieve_admissible_count);
    out.summarize("sieve_upper_density", report.sieve_upper_density.to_f64());
    out.summarize("sieve_upper_density_exact", report.sieve_upper_density.to_string());
    out.summarize("window_aligned", report.window_aligned);
    out.summarize("consistent", report.consistent);
    Ok(out)
}

fn cmd_average(args: &GlobalArgs, per_k: bool) -> CmdResult<OutputRecord> {
    let xs = integer_xs(args)?;
    if xs.is_empty() {
        return Err(Failure::Usage("missing required flag --X".into()));
    }
    let form = match &args.coeffs {
        Some(c) => Some(FormSpec::new(parse_coefficients(c)?, 1)?),
        None => None,
    };
    let s = match (&form, args.s) {
        (Some(f), _) => f.s() as u32,
        (None, Some(s)) => s,
        (None, None) => return Err(Failure::Usage("--s or --coeffs is required".into())),
    };
    if s < 2 {
        return Err(Failure::Usage(format!("need s >= 2, got {s}")));
    }
    let mode = if form.is_some() {
        BoundMode::Exact
    } else {
        BoundMode::Alpha
    };
    let r = args.r.unwrap_or(1.0);
    let columns: &[&str] = if per_k {
        &["X", "k", "bound"]
    } else {
        &["X", "average", "reference", "normalized", "prime_limit"]
    };
    let mut out = OutputRecord::new("average", echo_inputs(args, &[]), columns);
    for x in xs {
        let limit = args.prime_limit.unwrap_or_else(|| {
            (x as f64).powf(s as f64 / (s as f64 - 1.0)).ceil().max(2.0) as u64
        });
        let config = GlobalBoundConfig::new(r, limit, mode)?;
        let primes = sieve_primes(limit)?;
        let report = average_log_inv_density(x, s, &config, form.as_ref(), &primes)?;
        if per_k {
            for (k, v) in &report.per_k {
                out.push_row(vec![x.into(), (*k).into(), (*v).into()]);
            }
        } else {
            out.push_row(vec![
                x.into(),
                report.average.into(),
                report.reference.into(),
                report.normalized().into(),
                limit.into(),
            ]);
        }
    }
    Ok(out)
}

fn cmd_lemma3(args: &GlobalArgs) -> CmdResult<OutputRecord> {
    let x = single_x(args)?;
    let s = args.s.unwrap_or(3);
    let y = match (args.y, args.eta) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give --Y or --eta, not both".into())),
        (Some(y), None) => y,
        (None, Some(eta)) => AverageConfig::with_eta(x, s, eta)?.y,
        (None, None) => return Err(Failure::Usage("missing required flag --Y or --eta".into())),
    };
    if !(x >= 2.0 && y >= 1.0) {
        return Err(Failure::Usage(format!("need X >= 2 and Y >= 1, got X = {x}, Y = {y}")));
    }
    let limit = (x * y).ceil() as u64;
    let table = PsiTable::new(limit)?;
    let primes = sieve_primes(limit)?;
    let constants = LandauConstants::compute(DEFAULT_PRIME_CORRECTION_BOUND)?;

    let lhs = lemma3_lhs(&table, x, y)?;
    let main = lemma3_main_term(&constants, x, y);
    let err = lemma3_error_integral(&table, x, y, s)?;
    let double_sum = theorem1_double_sum(&primes, x, s, y)?;
    let s1 = s1_partial_summation_bound(&table, x, s, y)?;
    let excess = s1_prime_power_excess(&table, x, s, y)?;
    let xy = x * y;

    let mut out = OutputRecord::new(
        "lemma3",
        echo_inputs(args, &[]),
        &[
            "X",
            "Y",
            "s",
            "lhs",
            "main_term",
            "lhs_over_main",
            "lhs_over_cl_xy",
            "error_integral",
            "error_over_xy_log2x",
            "double_sum",
            "s1_bound",
            "prime_power_excess",
            "y_condition",
        ],
    );
    out.push_row(vec![
        x.into(),
        y.into(),
        s.into(),
        lhs.into(),
        main.into(),
        (lhs / main).into(),
        (lhs / (constants.c_l * xy)).into(),
        err.into(),
        (err / (xy / x.ln().powi(2))).into(),
        double_sum.into(),
        s1.into(),
        excess.into(),
        y_condition_holds(x, y, s).into(),
    ]);
    Ok(out)
}

fn cmd_landau(args: &GlobalArgs) -> CmdResult<OutputRecord> {
    let xs = if args.x.is_empty() {
        vec![10_000, 100_000]
    } else {
        integer_xs(args)?
    };
    let constants = LandauConstants::compute(DEFAULT_PRIME_CORRECTION_BOUND)?;
    let mut out = OutputRecord::new(
        "landau",
        echo_inputs(args, &[]),
        &["x", "partial_sum", "prediction", "error", "offset"],
    );
    for x in xs {
        let c = landau_sum(x, &constants)?;
        out.push_row(vec![
            x.into(),
            c.partial_sum.into(),
            c.prediction.into(),
            c.error().into(),
            (c.partial_sum - constants.c_l * (x as f64).ln()).into(),
        ]);
    }
    out.summarize("c_l", constants.c_l);
    out.summarize("c3", constants.c3);
    out.summarize("gamma", constants.gamma);
    out.summarize("prime_correction", constants.prime_correction);
    out.summarize("prime_bound", constants.prime_bound);
    Ok(out)
}

fn cmd_verify(args: &GlobalArgs) -> CmdResult<(OutputRecord, bool)> {
    let results = run_suite(args.seed)?;
    let mut out = OutputRecord::new(
        "verify",
        echo_inputs(args, &[]),
        &["check", "cases", "violations", "status"],
    );
    for r in &results {
        out.push_row(vec![
            r.name.into(),
            r.cases.into(),
            r.violations.into(),
            r.status().into(),
        ]);
    }
    let failed = results.iter().filter(|r| !r.passed()).count() as u64;
    out.summarize("checks", results.len() as u64);
    out.summarize("failed", failed);
    Ok((out, failed == 0))
}

fn execute(cli: &Cli) -> CmdResult<(OutputRecord, bool)> {
    let args = &cli.global;
    match &cli.command {
        Command::Local => cmd_local(args).map(|o| (o, true)),
        Command::Bound { mode } => cmd_bound(args, *mode).map(|o| (o, true)),
        Command::Scan { sieve_primes } => cmd_scan(args, sieve_primes).map(|o| (o, true)),
        Command::Average { per_k } => cmd_average(args, *per_k).map(|o| (o, true)),
        Command::Lemma3 => cmd_lemma3(args).map(|o| (o, true)),
        Command::Landau => cmd_landau(args).map(|o| (o, true)),
        Command::Verify => cmd_verify(args),
    }
}

fn thread_count(args: &GlobalArgs) -> CmdResult<Option<usize>> {
    if let Some(t) = args.threads {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("{THREADS_ENV} must be an integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn emit(cli: &Cli, record: &OutputRecord) -> CmdResult<()> {
    let text = match cli.global.format {
        Format::Csv => record.to_csv(),
        Format::Json => record.to_json(),
    };
    match &cli.global.out {
        Some(path) => std::fs::write(path, text).map_err(Failure::Io),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(Failure::Io)
        }
    }
}

fn run_parsed(cli: &Cli) -> CmdResult<bool> {
    let threads = thread_count(&cli.global)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::Usage(format!("cannot start worker pool: {e}")))?;
    let (record, ok) = pool.install(|| execute(cli))?;
    emit(cli, &record)?;
    Ok(ok)
}

/// Parses `argv` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run_parsed(&cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("verification failed");
            EXIT_FAILURE
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            if matches!(f, Failure::Usage(_)) {
                eprintln!("run with --help for usage");
            }
            f.exit_code()
        }
    }
}
