//! Command-line front end: transmissivity sweeps, rate-region boundaries,
//! the time-sharing comparison and the validation report.
//!
//! Exit codes are 0 on success, 1 for usage errors (bad flags, out-of-range
//! parameters) and 2 for numerical or validation failures.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cosmology::{eta_sweep, transmissivity, CosmologyParams, KGrid};
use crate::error::Error;
use crate::regions::{
    ce_timeshare, classical_capacity_product, cq_boundary, cq_boundary_general, cqe_boundary,
    cqe_boundary_general, entanglement_assisted_classical, entanglement_at_classical_rate,
    quantum_capacity, quantum_rate_at_classical_rate, timeshare_q, Generator, GridMeta,
    RegionBoundary, RegionKind, DEFAULT_GRID, DEFAULT_GRID_GENERAL,
};
use crate::validate::{self, ValidateOptions};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "RW_TRADEOFF_THREADS";

#[derive(Debug, Parser)]
#[command(name = "rw-tradeoff", version, about = "Rate regions of the amplitude damping channel of an expanding universe")]
pub struct Cli {
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for the parallel sweeps.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    /// `key=value` file supplying defaults for any long flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transmissivity over a momentum grid, one row per (epsilon, k).
    EtaSweep(EtaSweepArgs),
    /// Boundary of the achievable rate region.
    Region(RegionArgs),
    /// Trade-off coding against time sharing.
    Compare(CompareArgs),
    /// Oracle and multiplier checks as a JSON report.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Cq,
    Cqe,
}

#[derive(Debug, Args)]
pub struct EtaSweepArgs {
    #[arg(long, default_value_t = 100.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// A single value or `start:stop:step`, inclusive.
    #[arg(long, default_value = "10")]
    pub epsilon: String,
    /// Momentum range `min:max`.
    #[arg(long, default_value = "0.001:1000")]
    pub k: String,
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = Scale::Log)]
    pub scale: Scale,
}

/// Where the transmissivity comes from.
#[derive(Debug, Args)]
pub struct EtaSource {
    #[arg(long)]
    pub eta: Option<f64>,
    /// Take `eta` from the transmissivity at `--k`.
    #[arg(long)]
    pub from_cosmology: bool,
    #[arg(long, default_value_t = 10.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 100.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long)]
    pub k: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub source: EtaSource,
    #[arg(long, value_enum, default_value_t = Mode::Cq)]
    pub mode: Mode,
    /// Sweep two-letter ensembles instead of symmetric ones.
    #[arg(long)]
    pub general: bool,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid_p: usize,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid_nu: usize,
    /// Points per axis of the five-dimensional two-letter sweep.
    #[arg(long, default_value_t = DEFAULT_GRID_GENERAL)]
    pub grid_general: usize,
    /// Metadata file; defaults to the output path with a `.json` extension.
    #[arg(long)]
    pub meta: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub source: EtaSource,
    #[arg(long, value_enum, default_value_t = Mode::Cq)]
    pub mode: Mode,
    /// Classical rates sampled, endpoints included.
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Only the multiplier, concavity and worst-case checks.
    #[arg(long)]
    pub appendix: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("validation failed with {0} violation(s)")]
    Validation(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } | Error::Regime { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match with_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Appends `--key value` for every config entry whose flag is not already on
/// the command line, so explicit flags win over the file and the file over
/// built-in defaults. `true`/`false` toggle switches.
pub fn with_config(mut args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let given: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("{}:{}: expected key=value", path.display(), n + 1)));
        };
        let (key, value) = (key.trim(), value.trim());
        if key == "config" {
            continue;
        }
        let flag = format!("--{key}");
        let prefix = format!("{flag}=");
        if given.iter().any(|g| *g == flag || g.starts_with(&prefix)) {
            continue;
        }
        match value {
            "true" => args.push(flag.into()),
            "false" => {}
            v => {
                args.push(flag.into());
                args.push(v.into());
            }
        }
    }
    Ok(args)
}

fn execute(cli: &Cli) -> CliResult<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Numerical(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::EtaSweep(a) => cmd_eta_sweep(a, cli.out.as_deref()),
        Command::Region(a) => cmd_region(a, cli.out.as_deref()),
        Command::Compare(a) => cmd_compare(a, cli.out.as_deref()),
        Command::Validate(a) => cmd_validate(a, cli.out.as_deref()),
    })
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => io::stdout().write_all(bytes).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    // `+ 0.0` folds negative zero into zero.
    format!("{:.16e}", x + 0.0)
}

fn csv_bytes(header: &[&str], rows: &[Vec<f64>]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| CliError::Numerical(e.to_string());
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(r.iter().map(|&x| fmt_num(x))).map_err(io_err)?;
    }
    w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))
}

fn parse_f64(s: &str, what: &str) -> CliResult<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("{what}: cannot parse '{s}' as a number")))
}

/// `a` or `a:b:step`, inclusive of `b` up to rounding.
pub fn parse_epsilon_list(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a] => Ok(vec![parse_f64(a, "--epsilon")?]),
        [a, b, step] => {
            let (a, b, step) = (
                parse_f64(a, "--epsilon")?,
                parse_f64(b, "--epsilon")?,
                parse_f64(step, "--epsilon")?,
            );
            if !(step > 0.0 && b >= a) {
                return Err(CliError::Usage(format!(
                    "--epsilon {s}: need stop >= start and step > 0"
                )));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + step * i as f64).collect())
        }
        _ => Err(CliError::Usage(format!(
            "--epsilon {s}: expected a value or start:stop:step"
        ))),
    }
}

/// `min:max`.
pub fn parse_k_range(s: &str) -> CliResult<(f64, f64)> {
    match s.split_once(':') {
        Some((a, b)) => Ok((parse_f64(a, "--k")?, parse_f64(b, "--k")?)),
        None => Err(CliError::Usage(format!("--k {s}: expected min:max"))),
    }
}

fn cmd_eta_sweep(a: &EtaSweepArgs, out: Option<&Path>) -> CliResult<()> {
    let eps = parse_epsilon_list(&a.epsilon)?;
    let (k_min, k_max) = parse_k_range(&a.k)?;
    let grid = match a.scale {
        Scale::Log => KGrid::Log,
        Scale::Linear => KGrid::Linear,
    };
    let long = eps.len() > 1;
    let mut rows = Vec::with_capacity(eps.len() * a.steps);
    for &e in &eps {
        let params = CosmologyParams::new(e, a.rho, a.mass)?;
        for (k, t) in eta_sweep(&params, k_min, k_max, a.steps, grid)? {
            let mut row = Vec::with_capacity(4);
            if long {
                row.push(e);
            }
            row.extend([k, t.eta, t.particle_density]);
            rows.push(row);
        }
    }
    let header: &[&str] = if long {
        &["epsilon", "k", "eta", "n"]
    } else {
        &["k", "eta", "n"]
    };
    write_output(out, &csv_bytes(header, &rows)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct CosmologySource {
    epsilon: f64,
    rho: f64,
    mass: f64,
    k: f64,
}

fn resolve_eta(s: &EtaSource) -> CliResult<(f64, Option<CosmologySource>)> {
    if s.from_cosmology {
        if s.eta.is_some() {
            return Err(CliError::Usage("--eta and --from-cosmology are exclusive".into()));
        }
        let k = s
            .k
            .ok_or_else(|| CliError::Usage("--from-cosmology needs --k".into()))?;
        let params = CosmologyParams::new(s.epsilon, s.rho, s.mass)?;
        let t = transmissivity(&params, k)?;
        let src = CosmologySource {
            epsilon: s.epsilon,
            rho: s.rho,
            mass: s.mass,
            k,
        };
        return Ok((t.eta, Some(src)));
    }
    let eta = s
        .eta
        .ok_or_else(|| CliError::Usage("either --eta or --from-cosmology is required".into()))?;
    if !(0.0..=1.0).contains(&eta) {
        return Err(CliError::Usage(format!("--eta {eta} is outside [0, 1]")));
    }
    Ok((eta, None))
}

fn symmetric_regime(eta: f64, mode: &str) -> CliResult<()> {
    if eta < 0.5 {
        return Err(CliError::Usage(format!(
            "eta = {eta} < 0.5: symmetric ensembles no longer give the optimal {mode} region \
             because the channel is antidegradable and carries no quantum information; \
             rerun with --general for the two-letter sweep"
        )));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct Capacities {
    quantum: f64,
    quantum_argmax_p: f64,
    classical_product: f64,
    classical_product_argmax_p: f64,
    entanglement_assisted: f64,
    entanglement_assisted_argmax_p: f64,
    entanglement_assisted_e: f64,
}

impl Capacities {
    fn new(eta: f64) -> CliResult<Self> {
        let (quantum, quantum_argmax_p) = quantum_capacity(eta)?;
        let (classical_product, classical_product_argmax_p) = classical_capacity_product(eta)?;
        let (ea, ea_p, ea_e) = entanglement_assisted_classical(eta)?;
        Ok(Self {
            quantum,
            quantum_argmax_p,
            classical_product,
            classical_product_argmax_p,
            entanglement_assisted: ea,
            entanglement_assisted_argmax_p: ea_p,
            entanglement_assisted_e: ea_e,
        })
    }
}

#[derive(Debug, Serialize)]
struct RegionMeta<'a> {
    tool: &'static str,
    version: &'static str,
    eta: f64,
    kind: RegionKind,
    grid: &'a GridMeta,
    points: usize,
    c_intercept: f64,
    q_intercept: f64,
    capacities: Capacities,
    #[serde(skip_serializing_if = "Option::is_none")]
    cosmology: Option<CosmologySource>,
}

fn region_rows(b: &RegionBoundary) -> (Vec<&'static str>, Vec<Vec<f64>>) {
    let mut header = vec!["C", "Q"];
    if b.kind.has_entanglement() {
        header.push("E");
    }
    if b.kind.is_general() {
        header.extend(["p0", "q0", "q1", "nu0", "nu1"]);
    } else {
        header.extend(["p", "nu"]);
    }
    let rows = b
        .points
        .iter()
        .map(|pt| {
            let mut r = vec![pt.c, pt.q];
            if let Some(e) = pt.e {
                r.push(e);
            }
            match pt.generator {
                Generator::Symmetric(s) => r.extend([s.p, s.nu]),
                Generator::TwoLetter(t) => r.extend([t.p0, t.q0, t.q1, t.nu0, t.nu1]),
            }
            r
        })
        .collect();
    (header, rows)
}

fn cmd_region(a: &RegionArgs, out: Option<&Path>) -> CliResult<()> {
    let (eta, cosmology) = resolve_eta(&a.source)?;
    let boundary = match (a.mode, a.general) {
        (Mode::Cq, false) => {
            symmetric_regime(eta, "classical/quantum")?;
            cq_boundary(eta, a.grid_p, a.grid_nu)?
        }
        (Mode::Cqe, false) => {
            symmetric_regime(eta, "classical/quantum/entanglement")?;
            cqe_boundary(eta, a.grid_p, a.grid_nu)?
        }
        (Mode::Cq, true) => cq_boundary_general(eta, a.grid_general)?,
        (Mode::Cqe, true) => cqe_boundary_general(eta, a.grid_general)?,
    };
    let (header, rows) = region_rows(&boundary);
    let meta = RegionMeta {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        eta,
        kind: boundary.kind,
        grid: &boundary.grid,
        points: boundary.points.len(),
        c_intercept: boundary.c_intercept(),
        q_intercept: boundary.q_intercept(),
        capacities: Capacities::new(eta)?,
        cosmology,
    };
    let mut json = serde_json::to_vec_pretty(&meta).map_err(|e| CliError::Numerical(e.to_string()))?;
    json.push(b'\n');
    write_output(out, &csv_bytes(&header, &rows)?)?;
    let meta_path = a
        .meta
        .clone()
        .or_else(|| out.map(|p| p.with_extension("json")));
    match meta_path {
        Some(p) => write_output(Some(&p), &json),
        None => Ok(()),
    }
}

fn cmd_compare(a: &CompareArgs, out: Option<&Path>) -> CliResult<()> {
    let (eta, _) = resolve_eta(&a.source)?;
    if a.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let last = (a.points - 1) as f64;
    let (c_prod, _) = classical_capacity_product(eta)?;
    let rows: Vec<Vec<f64>> = match a.mode {
        Mode::Cq => {
            symmetric_regime(eta, "classical/quantum")?;
            let (q_cap, _) = quantum_capacity(eta)?;
            (0..a.points)
                .map(|i| {
                    let c = c_prod * i as f64 / last;
                    let q = quantum_rate_at_classical_rate(eta, c)?.unwrap_or(0.0);
                    let t = timeshare_q(q_cap, c_prod, c);
                    Ok(vec![c, q, t, q - t])
                })
                .collect::<CliResult<_>>()?
        }
        Mode::Cqe => {
            symmetric_regime(eta, "classical/quantum/entanglement")?;
            let (c_ea, _, e_ea) = entanglement_assisted_classical(eta)?;
            (0..a.points)
                .map(|i| {
                    let c = c_prod + (c_ea - c_prod) * i as f64 / last;
                    let e = entanglement_at_classical_rate(eta, c)?.unwrap_or(e_ea);
                    let t = ce_timeshare(c_prod, c_ea, e_ea, c);
                    Ok(vec![c, e, t, e - t])
                })
                .collect::<CliResult<_>>()?
        }
    };
    let header: &[&str] = match a.mode {
        Mode::Cq => &["C", "Q_tradeoff", "Q_timeshare", "gap"],
        Mode::Cqe => &["C", "E_tradeoff", "E_timeshare", "gap"],
    };
    write_output(out, &csv_bytes(header, &rows)?)
}

fn cmd_validate(a: &ValidateArgs, out: Option<&Path>) -> CliResult<()> {
    if !(a.tol.is_finite() && a.tol >= 0.0) {
        return Err(CliError::Usage(format!("--tol {} must be finite and non-negative", a.tol)));
    }
    let report = validate::run(&ValidateOptions {
        samples: a.samples,
        seed: a.seed,
        tolerance: a.tol,
        eta: a.eta,
        appendix_only: a.appendix,
    })?;
    let mut json = serde_json::to_vec_pretty(&report).map_err(|e| CliError::Numerical(e.to_string()))?;
    json.push(b'\n');
    write_output(out, &json)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Validation(report.violations))
    }
}
