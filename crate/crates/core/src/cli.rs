//! Command-line front end.
//!
//! Every flag may also come from a `--config` file of `key = value` lines;
//! flags given on the command line win. Records go to `--output`, to
//! `$YORKL_OUT_DIR/<command>.<ext>` when that variable is set, or to stdout.
//! Wall time never appears in the records: it is written to a sidecar
//! `<output>.meta.json` (stderr when printing to stdout).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bessel;
use crate::error::Error;
use crate::kl;
use crate::polys;
use crate::quadrature::QuadratureSpec;
use crate::report::CheckSuite;
use crate::suites;
use crate::yor;

/// Environment variable naming the default output directory.
pub const OUT_DIR_VAR: &str = "YORKL_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "yorkl", version, about = "Yor integral and Kontorovich-Lebedev toolkit")]
#[command(args_override_self = true)]
pub struct Cli {
    /// File of `key = value` lines supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long = "rel-tol", global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long = "abs-tol", global = true)]
    pub abs_tol: Option<f64>,
    /// Pass/fail tolerance for cross-checks.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one quantity at a point.
    Eval(PointArgs),
    /// Compare the direct and spectral forms of F_t(r) over a grid.
    Crosscheck(PointArgs),
    /// Run a named group of identity checks.
    Suite(PointArgs),
    /// Emit a table of F_t(r) values, exact polynomial coefficients or growth ratios.
    Table(PointArgs),
}

/// Parameters shared by all subcommands; each uses the subset it needs.
#[derive(Debug, Default, Args)]
pub struct PointArgs {
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub name: Option<String>,
    /// A value, a comma list or a grid `min:max:steps`.
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long)]
    pub tau: Option<String>,
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub nmax: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Eval,
    Crosscheck,
    Suite,
    Table,
}

impl CommandKind {
    fn name(self) -> &'static str {
        match self {
            CommandKind::Eval => "eval",
            CommandKind::Crosscheck => "crosscheck",
            CommandKind::Suite => "suite",
            CommandKind::Table => "table",
        }
    }
}

/// A fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: BTreeMap<String, String>,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TruncationUnsound { .. } | Error::InsufficientTruncation { .. } | Error::NonIntegerCoefficient { .. } => {
                EXIT_CHECK_FAILED
            }
            _ => EXIT_USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::usage(format!("i/o error: {e}"))
    }
}

/// Parse `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", i + 1)))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let (command, args) = match cli.command {
            Command::Eval(a) => (CommandKind::Eval, a),
            Command::Crosscheck(a) => (CommandKind::Crosscheck, a),
            Command::Suite(a) => (CommandKind::Suite, a),
            Command::Table(a) => (CommandKind::Table, a),
        };
        let mut params = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                params.insert(k.to_string(), v);
            }
        };
        put("target", args.target);
        put("name", args.name);
        put("r", args.r);
        put("t", args.t);
        put("tau", args.tau);
        put("x", args.x);
        put("y", args.y);
        put("n", args.n);
        put("nmax", args.nmax);
        put("rel-tol", cli.rel_tol.map(|v| v.to_string()));
        put("abs-tol", cli.abs_tol.map(|v| v.to_string()));
        put("tolerance", cli.tolerance.map(|v| v.to_string()));
        put("format", cli.format.map(|f| format!("{f:?}").to_lowercase()));
        put("output", cli.output.map(|p| p.display().to_string()));
        if let Some(path) = cli.config {
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
            for (k, v) in parse_config(&text)? {
                params.entry(k).or_insert(v);
            }
        }
        let format = match params.remove("format").as_deref() {
            None | Some("json") => OutputFormat::Json,
            Some("csv") => OutputFormat::Csv,
            Some(other) => return Err(CliError::usage(format!("unknown format {other:?}"))),
        };
        let output = params.remove("output").map(PathBuf::from);
        let cfg = Self { command, params, format, output };
        for key in ["rel-tol", "abs-tol", "tolerance"] {
            if let Some(v) = cfg.opt_f64(key)? {
                if !(v > 0.0) {
                    return Err(CliError::usage(format!("--{key} must be positive")));
                }
            }
        }
        Ok(cfg)
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::usage(format!("{} requires --{key}", self.command.name())))
    }

    fn parse<T: FromStr>(&self, key: &str, v: &str) -> Result<T, CliError> {
        v.trim().parse().map_err(|_| CliError::usage(format!("--{key}: cannot parse {v:?}")))
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key).map(|v| self.parse(key, v)).transpose()
    }

    fn f64(&self, key: &str) -> Result<f64, CliError> {
        let v = self.require(key)?;
        self.parse(key, v)
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.get(key) {
            Some(v) => self.parse(key, v),
            None => Ok(default),
        }
    }

    fn grid(&self, key: &str) -> Result<Vec<f64>, CliError> {
        parse_grid(self.require(key)?).map_err(|m| CliError::usage(format!("--{key}: {m}")))
    }

    fn grid_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        if self.get(key).is_some() {
            self.grid(key)
        } else {
            Ok(default.to_vec())
        }
    }

    fn quadrature(&self) -> Result<QuadratureSpec, CliError> {
        let mut spec = QuadratureSpec::default();
        if let Some(v) = self.opt_f64("rel-tol")? {
            spec = spec.with_rel_tol(v);
        }
        if let Some(v) = self.opt_f64("abs-tol")? {
            spec = spec.with_abs_tol(v);
        }
        Ok(spec)
    }
}

/// `min:max:steps` (inclusive endpoints), a comma list, or one value.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("cannot parse {s:?}"));
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid {text:?} is not min:max:steps"));
        }
        let (lo, hi) = (num(parts[0])?, num(parts[1])?);
        let steps: usize = parts[2].trim().parse().map_err(|_| format!("bad step count {:?}", parts[2]))?;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(format!("grid needs min < max, got {lo}:{hi}"));
        }
        if steps < 2 {
            return Err("grid needs at least 2 steps".into());
        }
        let h = (hi - lo) / (steps - 1) as f64;
        Ok((0..steps).map(|i| if i + 1 == steps { hi } else { lo + h * i as f64 }).collect())
    } else {
        text.split(',').map(num).collect()
    }
}

/// A run's output: rows with a fixed column order, plus wall time.
#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub wall_time_s: f64,
    pub exit_code: i32,
    /// Message for stderr, such as the first failing check.
    pub note: Option<String>,
}

impl Emission {
    fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new(), wall_time_s: 0.0, exit_code: EXIT_OK, note: None }
    }

    fn from_suite(suite: &CheckSuite) -> Self {
        let mut e = Self::new(vec!["context", "lhs", "rhs", "rel_diff", "tolerance", "passed"]);
        for c in &suite.checks {
            e.rows.push(vec![
                json!(c.context),
                json_f64(c.lhs),
                json_f64(c.rhs),
                json_f64(c.rel_diff),
                json_f64(c.tolerance),
                json!(c.passed),
            ]);
        }
        if let Some(fail) = suite.first_failure() {
            e.exit_code = EXIT_CHECK_FAILED;
            e.note = Some(format!(
                "check failed: {} (lhs {:e}, rhs {:e}, rel_diff {:e}, tolerance {:e})",
                fail.context, fail.lhs, fail.rhs, fail.rel_diff, fail.tolerance
            ));
        }
        e
    }

    /// JSON lines, one object per row.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let obj: serde_json::Map<String, Value> =
                self.columns.iter().map(|c| c.to_string()).zip(row.iter().cloned()).collect();
            out.push_str(&Value::Object(obj).to_string());
            out.push('\n');
        }
        out
    }

    /// CSV with a header row. Numbers are written exactly as in JSON.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json_lines(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    pub fn metadata(&self, cfg: &RunConfig) -> Value {
        json!({
            "command": cfg.command,
            "params": cfg.params,
            "rows": self.rows.len(),
            "exit_code": self.exit_code,
            "wall_time_s": self.wall_time_s,
        })
    }
}

/// Non-finite values become strings so JSON stays valid.
fn json_f64(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) if s.contains(',') || s.contains('"') => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Execute a resolved configuration without writing anything.
pub fn execute(cfg: &RunConfig) -> Result<Emission, CliError> {
    let start = Instant::now();
    let mut e = match cfg.command {
        CommandKind::Eval => cmd_eval(cfg)?,
        CommandKind::Crosscheck => cmd_crosscheck(cfg)?,
        CommandKind::Suite => cmd_suite(cfg)?,
        CommandKind::Table => cmd_table(cfg)?,
    };
    e.wall_time_s = start.elapsed().as_secs_f64();
    Ok(e)
}

fn cmd_eval(cfg: &RunConfig) -> Result<Emission, CliError> {
    let spec = cfg.quadrature()?;
    let target = cfg.require("target")?;
    let mut e = Emission::new(vec!["target", "params", "value", "error_estimate", "method", "converged"]);
    let (value, err, method, converged) = match target {
        "yor_direct" | "yor_spectral" => {
            let (r, t) = (cfg.f64("r")?, cfg.f64("t")?);
            let p = if target == "yor_direct" { yor::yor_direct(r, t, &spec)? } else { yor::yor_spectral(r, t, &spec)? };
            let method = format!("{:?}", p.method).to_lowercase();
            (p.value, p.error_estimate, method, p.error_estimate <= spec.tolerance_for(p.value))
        }
        "bessel_k_imag" => {
            let v = bessel::bessel_k_imag(cfg.f64("tau")?, cfg.f64("x")?)?;
            (v, bessel::k_imag_noise(cfg.f64("x")?), "cosine integral".to_string(), true)
        }
        "poly_eval" => {
            let n: usize = cfg.parse("n", cfg.require("n")?)?;
            let p = polys::poly_recurrence(n);
            (polys::poly_eval(&p, cfg.f64("x")?), 0.0, "exact coefficients".to_string(), true)
        }
        "heat_kernel" => {
            let p = kl::heat_kernel(cfg.f64("t")?, cfg.f64("x")?, cfg.f64("y")?, &spec)?;
            (p.value, f64::NAN, "spectral".to_string(), true)
        }
        "kl_forward" => {
            let f = test_function(cfg)?;
            let res = kl::kl_forward_eval(&f, cfg.f64("tau")?, &spec)?;
            (res.value, res.error_estimate, format!("forward transform of {}", cfg.get("name").unwrap_or("exp")), res.converged)
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown eval target {other:?}; expected yor_direct, yor_spectral, bessel_k_imag, poly_eval, heat_kernel or kl_forward"
            )))
        }
    };
    let mut params = cfg.params.clone();
    params.remove("target");
    let params = params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
    e.rows.push(vec![json!(target), json!(params), json_f64(value), json_f64(err), json!(method), json!(converged)]);
    if !converged {
        e.exit_code = EXIT_CHECK_FAILED;
        e.note = Some(format!("{target}: quadrature did not reach the requested tolerance"));
    }
    Ok(e)
}

/// `--name` picks the function for `kl_forward`: `exp` (default), `one`,
/// `poly` (with `--n`) or `yor` (with `--t`).
fn test_function(cfg: &RunConfig) -> Result<kl::TestFunction, CliError> {
    Ok(match cfg.get("name").unwrap_or("exp") {
        "exp" => kl::TestFunction::Exponential { rate: 1.0 },
        "one" => kl::TestFunction::Constant(1.0),
        "poly" => kl::TestFunction::poly_kernel(cfg.parse("n", cfg.require("n")?)?),
        "yor" => kl::TestFunction::yor_sampled(cfg.f64("t")?)?,
        other => return Err(CliError::usage(format!("unknown test function {other:?}"))),
    })
}

fn cmd_crosscheck(cfg: &RunConfig) -> Result<Emission, CliError> {
    let spec = cfg.quadrature()?;
    let tol = cfg.opt_f64("tolerance")?.unwrap_or(suites::CROSS_REPRESENTATION_TOL);
    let rs = cfg.grid_or("r", suites::CROSS_R)?;
    let ts = cfg.grid_or("t", suites::CROSS_T)?;
    let points: Vec<(f64, f64)> = ts.iter().flat_map(|&t| rs.iter().map(move |&r| (r, t))).collect();
    let results = parallel_map(&points, |&(r, t)| suites::cross_representation(r, t, tol, &spec));
    let mut suite = CheckSuite::new("crosscheck");
    for res in results {
        suite.push(res?);
    }
    Ok(Emission::from_suite(&suite))
}

fn cmd_suite(cfg: &RunConfig) -> Result<Emission, CliError> {
    let name = cfg.require("name")?;
    let nmax = cfg.usize_or("nmax", suites::DEFAULT_NMAX)?;
    let suite = match name {
        "polys" => suites::polys_suite(nmax)?,
        "bessel" => suites::bessel_suite()?,
        "yor" => suites::yor_suite()?,
        "kl" => suites::kl_suite()?,
        "all" => {
            let mut s = CheckSuite::new("all");
            s.extend(suites::polys_suite(nmax)?);
            s.extend(suites::bessel_suite()?);
            s.extend(suites::yor_suite()?);
            s.extend(suites::kl_suite()?);
            s
        }
        other => {
            return Err(CliError::usage(format!("unknown suite {other:?}; expected polys, yor, kl, bessel or all")))
        }
    };
    Ok(Emission::from_suite(&suite))
}

const RATIO_BETAS: &[f64] = &[0.5, 1.0, 1.5];
const RATIO_NMAX: usize = 25;

fn cmd_table(cfg: &RunConfig) -> Result<Emission, CliError> {
    match cfg.require("target")? {
        "yor" => {
            let spec = cfg.quadrature()?;
            let rs = cfg.grid("r")?;
            let ts = cfg.grid("t")?;
            let points: Vec<(f64, f64)> = ts.iter().flat_map(|&t| rs.iter().map(move |&r| (r, t))).collect();
            let results = parallel_map(&points, |&(r, t)| yor::yor_direct(r, t, &spec));
            let mut e = Emission::new(vec!["r", "t", "value", "error_estimate"]);
            for res in results {
                let p = res?;
                e.rows.push(vec![json_f64(p.r), json_f64(p.t), json_f64(p.value), json_f64(p.error_estimate)]);
            }
            Ok(e)
        }
        "coeffs" => {
            let nmax: usize = cfg.parse("nmax", cfg.require("nmax")?)?;
            let mut e = Emission::new(vec!["n", "k", "coefficient"]);
            for p in polys::poly_table(nmax) {
                let n = p.degree();
                for (k, c) in p.coeffs().iter().enumerate() {
                    if n == 0 || k > 0 {
                        e.rows.push(vec![json!(n), json!(k), json!(c.to_string())]);
                    }
                }
            }
            Ok(e)
        }
        "ratio" => {
            let nmax = cfg.usize_or("nmax", RATIO_NMAX)?;
            let x: f64 = cfg.get("x").map_or(Ok(1.0), |v| cfg.parse("x", v))?;
            let rows = polys::asymptotic_ratio_study(x, RATIO_BETAS, nmax)?;
            let mut e = Emission::new(vec!["n", "beta", "p_n", "main_term", "ratio", "step"]);
            for r in rows {
                e.rows.push(vec![
                    json!(r.n),
                    json_f64(r.beta),
                    json_f64(r.p_n),
                    json_f64(r.main_term),
                    json_f64(r.ratio),
                    r.step.map_or(Value::Null, json_f64),
                ]);
            }
            Ok(e)
        }
        other => Err(CliError::usage(format!("unknown table target {other:?}; expected yor, coeffs or ratio"))),
    }
}

/// Map over `items` on scoped threads, keeping input order.
fn parallel_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    if workers <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    std::thread::scope(|s| {
        let handles: Vec<_> =
            items.chunks(chunk).map(|part| s.spawn(|| part.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn destination(cfg: &RunConfig) -> Option<PathBuf> {
    if let Some(p) = &cfg.output {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_VAR)?;
    let ext = match cfg.format {
        OutputFormat::Json => "jsonl",
        OutputFormat::Csv => "csv",
    };
    let stem = match (cfg.command, cfg.get("name"), cfg.get("target")) {
        (CommandKind::Suite, Some(name), _) => format!("suite-{name}"),
        (_, _, Some(target)) => format!("{}-{target}", cfg.command.name()),
        _ => cfg.command.name().to_string(),
    };
    Some(Path::new(&dir).join(format!("{stem}.{ext}")))
}

fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Parse, execute and emit; returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run_config(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn run_config(cli: Cli) -> Result<i32, CliError> {
    let cfg = RunConfig::from_cli(cli)?;
    let emission = execute(&cfg)?;
    let body = emission.render(cfg.format);
    let meta = emission.metadata(&cfg).to_string();
    match destination(&cfg) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(&path, body)?;
            fs::write(meta_path(&path), meta)?;
            let mut msg = String::new();
            let _ = write!(msg, "wrote {} rows to {}", emission.rows.len(), path.display());
            eprintln!("{msg}");
        }
        None => {
            print!("{body}");
            eprintln!("{meta}");
        }
    }
    if let Some(note) = &emission.note {
        eprintln!("{note}");
    }
    Ok(emission.exit_code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> RunConfig {
        let mut v = vec!["yorkl"];
        v.extend_from_slice(args);
        RunConfig::from_cli(Cli::try_parse_from(v).unwrap()).unwrap()
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.5:5:10").unwrap().len(), 10);
        let g = parse_grid("1:2:3").unwrap();
        assert_eq!(g, vec![1.0, 1.5, 2.0]);
        assert_eq!(parse_grid("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_grid("2:1:3").is_err());
        assert!(parse_grid("1:2:1").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn config_lines() {
        let m = parse_config("# c\nr = 1\n\nrel_tol=1e-8\n").unwrap();
        assert_eq!(m["r"], "1");
        assert_eq!(m["rel-tol"], "1e-8");
        assert!(parse_config("oops").is_err());
    }

    #[test]
    fn poly_eval_record() {
        let e = execute(&cfg(&["eval", "--target", "poly_eval", "--n", "3", "--x", "2"])).unwrap();
        assert_eq!(e.rows[0][2], json!(-62.0));
        assert_eq!(e.exit_code, EXIT_OK);
    }

    #[test]
    fn window_error_is_usage() {
        let err = execute(&cfg(&["eval", "--target", "yor_direct", "--r", "1", "--t", "0.05"])).unwrap_err();
        assert_eq!(err.code, EXIT_USAGE);
    }

    #[test]
    fn coefficient_table() {
        let e = execute(&cfg(&["table", "--target", "coeffs", "--nmax", "12"])).unwrap();
        assert!(e.rows.contains(&vec![json!(3), json!(3), json!("-15")]));
        assert!(e.rows.contains(&vec![json!(12), json!(12), json!("316234143225")]));
    }

    #[test]
    fn csv_and_json_agree() {
        let e = execute(&cfg(&["table", "--target", "coeffs", "--nmax", "4"])).unwrap();
        let json_rows: Vec<Value> =
            e.to_json_lines().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        let csv = e.to_csv();
        let mut lines = csv.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        for (line, obj) in lines.zip(&json_rows) {
            for (col, cell) in header.iter().zip(line.split(',')) {
                assert_eq!(csv_cell(&obj[*col]), cell);
            }
        }
    }
}
