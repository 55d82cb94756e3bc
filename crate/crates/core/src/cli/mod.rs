//! Command-line front end: `zeros`, `correlator`, `verify`, `zero-times`.
//!
//! Exit codes: 0 ok, 1 tolerance failure, 2 parse error, 3 numeric failure,
//! 4 dimension cap, 5 no reachable zero.

pub mod model_file;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::correlator::{
    linear_grid, scan_correlator, ClosedFormCorrelator, Correlator, Method, OracleCorrelator,
};
use crate::error::Error;
use crate::model::{ModelKind, ProbeParams, SpinModel, ThermalParams};
use crate::sector::{lee_yang_polynomial, sector_spectra};
use crate::zeros::{
    find_polynomial_roots, roots_to_fields, zero_time_period, zero_times, ZeroTime,
    DEFAULT_WINDINGS,
};
use model_file::{LoadedModel, ModelFile};
use output::{Cell, Format, Table};

/// Identity and t-shift deviations `verify` must stay under.
pub const VERIFY_TOLERANCE: f64 = 1e-10;
/// Largest bath `verify` accepts.
pub const VERIFY_MAX_SITES: usize = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("tolerance failure: {0}")]
    Tolerance(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("dimension cap: {0}")]
    Cap(String),
    #[error("no reachable zero: {0}")]
    Unreachable(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Tolerance(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Cap(_) => 4,
            CliError::Unreachable(_) => 5,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionCap { .. } => CliError::Cap(e.to_string()),
            Error::NoConvergence { .. } | Error::ZeroDegree | Error::EmptyTrace => {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Numeric(format!("i/o: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "leeyang", version, about = "Lee-Yang zeros from probe-spin correlators")]
pub struct Cli {
    /// Worker threads for grid evaluation (default: number of cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output path, `-` for standard output
    #[arg(long, short, default_value = "-")]
    pub out: PathBuf,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    #[value(name = "closed_form", alias = "closed-form")]
    ClosedForm,
    Oracle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::ClosedForm => Method::ClosedForm,
            MethodArg::Oracle => Method::Oracle,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lee-Yang zeros of the bath partition function
    Zeros {
        model: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sample the probe correlator C(τ) on a uniform grid
    Correlator {
        model: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        tau_min: f64,
        #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
        tau_max: f64,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::ClosedForm)]
        method: MethodArg,
        /// First time argument t (the correlator does not depend on it)
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
        /// Standard deviation of additive Gaussian noise on each sample
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the closed form against the full-space oracle on random (t, τ)
    Verify {
        model: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Real times at which the correlator vanishes
    ZeroTimes {
        model: PathBuf,
        #[arg(long, default_value_t = DEFAULT_WINDINGS)]
        n_windows: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("leeyang: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Zeros { model, output } => cmd_zeros(model, output),
        Command::Correlator {
            model,
            tau_min,
            tau_max,
            points,
            method,
            t,
            noise,
            seed,
            output,
        } => cmd_correlator(
            model,
            &CorrelatorArgs {
                tau_min: *tau_min,
                tau_max: *tau_max,
                points: *points,
                method: (*method).into(),
                t: *t,
                noise: *noise,
                seed: *seed,
            },
            output,
        ),
        Command::Verify {
            model,
            samples,
            seed,
            output,
        } => cmd_verify(model, *samples, *seed, output),
        Command::ZeroTimes {
            model,
            n_windows,
            output,
        } => cmd_zero_times(model, *n_windows, output),
    }
}

fn load(path: &Path) -> Result<(ModelFile, LoadedModel), CliError> {
    let file = ModelFile::load(path)?;
    let loaded = file.validate()?;
    Ok((file, loaded))
}

fn emit(output: &OutputArgs, header: &Value, table: &Table) -> Result<(), CliError> {
    if output.out.as_os_str() == "-" {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        table.write(&mut lock, header, output.format)?;
        lock.flush()?;
    } else {
        let mut w = BufWriter::new(File::create(&output.out)?);
        table.write(&mut w, header, output.format)?;
        w.flush()?;
    }
    Ok(())
}

pub fn cmd_zeros(path: &Path, output: &OutputArgs) -> Result<(), CliError> {
    let (file, m) = load(path)?;
    let poly = lee_yang_polynomial(&sector_spectra(&m.model)?, &m.thermal);
    let roots = find_polynomial_roots(&poly)?;
    let zeros = roots_to_fields(&roots, &m.thermal);

    let mut table = Table::new(vec![
        "re_q", "im_q", "abs_q", "phase", "re_h_tilde", "im_h_tilde", "residual",
    ]);
    for z in &zeros {
        table.push(vec![
            Cell::Num(z.q.re),
            Cell::Num(z.q.im),
            Cell::Num(z.q.norm()),
            Cell::Num(z.phase),
            Cell::Num(z.h_tilde.re),
            Cell::Num(z.h_tilde.im),
            Cell::Num(z.residual),
        ]);
    }
    let header = json!({ "command": "zeros", "model": file });
    emit(output, &header, &table)
}

pub struct CorrelatorArgs {
    pub tau_min: f64,
    pub tau_max: f64,
    pub points: usize,
    pub method: Method,
    pub t: f64,
    pub noise: f64,
    pub seed: u64,
}

pub fn cmd_correlator(
    path: &Path,
    args: &CorrelatorArgs,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let (file, m) = load(path)?;
    if args.points < 2 {
        return Err(CliError::Parse("--points must be at least 2".into()));
    }
    if !(args.tau_max > args.tau_min) {
        return Err(CliError::Parse("--tau-max must exceed --tau-min".into()));
    }
    if !(args.noise >= 0.0 && args.noise.is_finite()) {
        return Err(CliError::Parse("--noise must be a finite non-negative amplitude".into()));
    }
    let grid = linear_grid(args.tau_min, args.tau_max, args.points);
    let trace = scan_correlator(&m.model, &m.probe, &m.thermal, args.t, &grid, args.method)?
        .with_additive_noise(args.noise, args.seed);

    let mut table = Table::new(vec!["tau", "re_C", "im_C", "abs_C"]);
    for (tau, c) in trace.tau_grid.iter().zip(&trace.values) {
        table.push(vec![
            Cell::Num(*tau),
            Cell::Num(c.re),
            Cell::Num(c.im),
            Cell::Num(c.norm()),
        ]);
    }
    let header = json!({
        "command": "correlator",
        "model": file,
        "method": args.method.as_str(),
        "tau_min": args.tau_min,
        "tau_max": args.tau_max,
        "points": args.points,
        "t": args.t,
        "noise": args.noise,
        "seed": args.seed,
    });
    emit(output, &header, &table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyReport {
    pub samples: usize,
    pub max_rel_deviation: f64,
    pub worst_t: f64,
    pub worst_tau: f64,
    pub max_t_shift_deviation: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.max_rel_deviation < VERIFY_TOLERANCE && self.max_t_shift_deviation < VERIFY_TOLERANCE
    }
}

/// Draws `samples` pairs t, τ ∈ [0, 10] and compares the closed form with the
/// oracle at (t, τ), and the oracle at (t, τ) with the oracle at (0, τ).
pub fn verify_identity(
    model: &SpinModel,
    probe: &ProbeParams,
    thermal: &ThermalParams,
    samples: usize,
    seed: u64,
) -> Result<VerifyReport, CliError> {
    if model.n_sites() > VERIFY_MAX_SITES {
        return Err(CliError::Cap(format!(
            "verify supports at most {VERIFY_MAX_SITES} bath sites, got {}",
            model.n_sites()
        )));
    }
    let closed = ClosedFormCorrelator::new(model, probe, thermal)?;
    let oracle = OracleCorrelator::new(model, probe, thermal)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport {
        samples,
        max_rel_deviation: 0.0,
        worst_t: 0.0,
        worst_tau: 0.0,
        max_t_shift_deviation: 0.0,
    };
    for _ in 0..samples {
        let t = rng.random_range(0.0..=10.0);
        let tau = rng.random_range(0.0..=10.0);
        let reference = oracle.evaluate(t, tau);
        let rel = (closed.evaluate(t, tau) - reference).norm() / reference.norm().max(1e-30);
        if rel > report.max_rel_deviation {
            report.max_rel_deviation = rel;
            report.worst_t = t;
            report.worst_tau = tau;
        }
        let shift = (oracle.evaluate(0.0, tau) - reference).norm();
        report.max_t_shift_deviation = report.max_t_shift_deviation.max(shift);
    }
    Ok(report)
}

pub fn cmd_verify(
    path: &Path,
    samples: usize,
    seed: u64,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let (file, m) = load(path)?;
    let report = verify_identity(&m.model, &m.probe, &m.thermal, samples, seed)?;
    let mut table = Table::new(vec![
        "samples",
        "max_rel_deviation",
        "worst_t",
        "worst_tau",
        "max_t_shift_deviation",
        "tolerance",
        "pass",
    ]);
    table.push(vec![
        Cell::Int(report.samples as i64),
        Cell::Num(report.max_rel_deviation),
        Cell::Num(report.worst_t),
        Cell::Num(report.worst_tau),
        Cell::Num(report.max_t_shift_deviation),
        Cell::Num(VERIFY_TOLERANCE),
        Cell::Bool(report.passed()),
    ]);
    let header = json!({ "command": "verify", "model": file, "samples": samples, "seed": seed });
    emit(output, &header, &table)?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Tolerance(format!(
            "max relative deviation {:e} at t = {}, tau = {}; max t-shift deviation {:e}",
            report.max_rel_deviation, report.worst_t, report.worst_tau, report.max_t_shift_deviation
        )))
    }
}

/// Triangle cluster: two Ising bath spins coupled by J > 0 with λ = J.
fn triangle_coupling(model: &SpinModel, probe: &ProbeParams) -> Option<f64> {
    match (model.kind(), model.n_sites(), model.couplings()) {
        (ModelKind::IsingZz, 2, [c]) if c.strength > 0.0 && c.strength == probe.lambda => {
            Some(c.strength)
        }
        _ => None,
    }
}

/// Zero times read literally off the triangle formula
/// τ = ℏ/(4J)(±tan√(e^{4βJ} − 1) + 2πn); the + branch belongs to the root
/// with Im q > 0.
fn literal_triangle_time(j: f64, thermal: &ThermalParams, phase: f64, winding: u32) -> f64 {
    let period = std::f64::consts::PI * thermal.hbar / (2.0 * j);
    let sign = if phase > 0.0 { 1.0 } else { -1.0 };
    let angle = ((4.0 * thermal.beta * j).exp() - 1.0).sqrt().tan();
    let first = (thermal.hbar / (4.0 * j) * sign * angle).rem_euclid(period);
    first + winding as f64 * period
}

pub fn cmd_zero_times(path: &Path, n_windows: u32, output: &OutputArgs) -> Result<(), CliError> {
    let (file, m) = load(path)?;
    let poly = lee_yang_polynomial(&sector_spectra(&m.model)?, &m.thermal);
    let zeros = roots_to_fields(&find_polynomial_roots(&poly)?, &m.thermal);
    let mut times: Vec<ZeroTime> =
        zero_times(&zeros, m.model.bath_field(), &m.probe, &m.thermal, n_windows)?;
    let closed = ClosedFormCorrelator::new(&m.model, &m.probe, &m.thermal)?;
    for t in &mut times {
        t.residual = Some(closed.evaluate(0.0, t.tau).norm());
    }

    let triangle = triangle_coupling(&m.model, &m.probe);
    let mut columns = vec![
        "index", "source", "reachable", "required_h", "tau", "winding", "abs_C",
    ];
    if triangle.is_some() {
        columns.extend(["literal_tau", "discrepancy"]);
    }
    let mut table = Table::new(columns);
    for (index, t) in times.iter().enumerate() {
        let mut row = vec![
            Cell::Int(index as i64),
            Cell::Int(t.source as i64),
            Cell::Bool(t.reachable),
            if t.reachable {
                Cell::Empty
            } else {
                Cell::Num(t.required_h)
            },
            Cell::Num(t.tau),
            Cell::Int(t.winding as i64),
            Cell::Num(t.residual.unwrap_or(f64::NAN)),
        ];
        if let Some(j) = triangle {
            let literal = literal_triangle_time(j, &m.thermal, zeros[t.source].phase, t.winding);
            row.extend([Cell::Num(literal), Cell::Num(t.tau - literal)]);
        }
        table.push(row);
    }
    let header = json!({
        "command": "zero-times",
        "model": file,
        "n_windows": n_windows,
        "period": zero_time_period(&m.probe, &m.thermal),
    });
    emit(output, &header, &table)?;

    if triangle.is_some() {
        eprintln!(
            "triangle cluster: literal_tau reads the closed triangle formula with tan; \
             the derived tau comes from the polynomial roots and is the one at which |C| vanishes"
        );
    }
    if times.iter().any(|t| t.reachable) {
        Ok(())
    } else {
        let needed: Vec<String> = times.iter().map(|t| format!("{:.12}", t.required_h)).collect();
        Err(CliError::Unreachable(format!(
            "no zero lies on Re h~ = h + lambda = {}; required h: {}",
            m.model.bath_field() + m.probe.lambda,
            needed.join(", ")
        )))
    }
}
