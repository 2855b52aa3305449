//! The `ngsl` command-line front end.
//!
//! ```text
//! ngsl simulate|event|sweep|verify-ngsl|demon --scenario <path> [--out <dir>] [--mode differential|exact]
//! ```
//!
//! Exit codes: 0 success, 1 invalid input, 2 NGSL violation detected,
//! 3 I/O failure. `NGSL_THREADS` caps sweep parallelism.

pub mod report;
pub mod scenario;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::demon::{szilard_grid, verify_ngsl, NgslReport, Protocol};
use crate::evolution::{integrate, Trajectory};
use crate::ledger::{apply_event, Channel, LedgerMode};
use crate::shell::{
    channel_width_bound, shell_entropy_change, shell_info_change, shell_ngsl_residual,
};
use crate::BlackHole;

use report::{
    effective_di, events_csv, ngsl_verdicts, run_summary, to_json, trajectory_csv, DemonSummary,
    SCHEMA_VERSION,
};
use scenario::{expand_sweep, parse_scenario, OutputFormat, Scenario, DEFAULT_DEMON_TOLERANCE};

pub const THREADS_ENV: &str = "NGSL_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "ngsl",
    version,
    about = "Black-hole information ledger and NGSL checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output directory; overrides `output.directory`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Ledger mode; overrides the scenario's `mode`.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Differential,
    Exact,
}

impl From<ModeArg> for LedgerMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Differential => LedgerMode::Differential,
            ModeArg::Exact => LedgerMode::Exact,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the scenario and write trajectory CSV + summary JSON.
    Simulate(CommonArgs),
    /// Apply the first transit to the initial hole and print the ledger entry.
    Event(CommonArgs),
    /// Run every point of the scenario's [sweep] grid.
    Sweep(CommonArgs),
    /// Check ledger balances and shell residuals for every transit.
    #[command(name = "verify-ngsl")]
    VerifyNgsl(CommonArgs),
    /// Check dS - dI >= 0 over the scenario's demon grid.
    Demon(CommonArgs),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] scenario::ScenarioError),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 3,
            _ => 1,
        }
    }
}

/// Outcome of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Violation,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Ok => 0,
            Verdict::Violation => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(io_err(format!("reading {}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(io_err(format!("writing {}", path.display())))
}

fn load(args: &CommonArgs) -> CliResult<Scenario> {
    let scenario = parse_scenario(&read_text(&args.scenario)?)?;
    Ok(match args.mode {
        Some(m) => scenario.with_mode(m.into()),
        None => scenario,
    })
}

fn out_dir(args: &CommonArgs, scenario: &Scenario) -> PathBuf {
    args.out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&scenario.output.directory))
}

/// Run one subcommand, writing human-readable output to `stdout`.
pub fn run(command: &Command, stdout: &mut dyn Write) -> CliResult<Verdict> {
    match command {
        Command::Simulate(args) => {
            let scenario = load(args)?;
            let dir = out_dir(args, &scenario);
            let summary = simulate_into(&scenario, &dir)?;
            writeln!(
                stdout,
                "{}: stop={:?} t={} M={} budget={} -> {}",
                summary.scenario,
                summary.stop_reason,
                summary.final_time,
                summary.final_mass,
                summary.totals.channel_budget,
                dir.display()
            )
            .map_err(io_err("writing stdout"))?;
            Ok(Verdict::Ok)
        }
        Command::Event(args) => {
            let scenario = load(args)?;
            let report = single_event(&scenario)?;
            stdout
                .write_all(to_json(&report).as_bytes())
                .map_err(io_err("writing stdout"))?;
            Ok(Verdict::Ok)
        }
        Command::Sweep(args) => {
            let text = read_text(&args.scenario)?;
            let mut points = expand_sweep(&text)?;
            if let Some(m) = args.mode {
                for p in &mut points {
                    p.scenario.evolution.ledger_mode = m.into();
                }
            }
            let dir = args
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(&points[0].scenario.output.directory));
            let n = run_sweep(&points, &dir)?;
            writeln!(stdout, "sweep: {n} points -> {}", dir.display())
                .map_err(io_err("writing stdout"))?;
            Ok(Verdict::Ok)
        }
        Command::VerifyNgsl(args) => {
            let scenario = load(args)?;
            let traj = integrate(
                &BlackHole::new(scenario.initial_mass)?,
                &scenario.events,
                &scenario.evolution,
            )?;
            let verdicts = ngsl_verdicts(&traj, &scenario.declared_di);
            for (i, r) in traj.events.iter().enumerate() {
                let di = effective_di(r, scenario.declared_di[i]);
                let residual = shell_ngsl_residual(&r.shell, r.entry.dm, di);
                let status = if verdicts.violations.contains(&i) {
                    "VIOLATION"
                } else {
                    "ok"
                };
                writeln!(
                    stdout,
                    "event {i}: t={} dM={} balance(sense)={} balance(carry)={} bound={} dI={} residual={} {status}",
                    r.event.time,
                    r.entry.dm,
                    r.entry.ngsl_balance(Channel::Sense),
                    r.entry.ngsl_balance(Channel::Carry),
                    r.bound,
                    di,
                    residual,
                )
                .map_err(io_err("writing stdout"))?;
            }
            let verdict = if verdicts.pass {
                Verdict::Ok
            } else {
                Verdict::Violation
            };
            writeln!(
                stdout,
                "verdict: {} ({} events, {} violations)",
                if verdicts.pass { "pass" } else { "fail" },
                traj.events.len(),
                verdicts.violations.len()
            )
            .map_err(io_err("writing stdout"))?;
            Ok(verdict)
        }
        Command::Demon(args) => {
            let scenario = load(args)?;
            let report = demon_report(&scenario)?;
            let dir = out_dir(args, &scenario);
            if scenario.output.wants(OutputFormat::Json) {
                fs::create_dir_all(&dir).map_err(io_err(format!("creating {}", dir.display())))?;
                write_file(&dir.join("demon_report.json"), &to_json(&report))?;
            }
            let summary = DemonSummary::of(&report);
            stdout
                .write_all(to_json(&summary).as_bytes())
                .map_err(io_err("writing stdout"))?;
            Ok(if report.pass {
                Verdict::Ok
            } else {
                Verdict::Violation
            })
        }
    }
}

/// Demon grid from the scenario, or the default optimal Szilard grid.
pub fn demon_report(scenario: &Scenario) -> CliResult<NgslReport> {
    Ok(match &scenario.demon {
        Some(grid) => verify_ngsl(&grid.models, grid.tolerance)?,
        None => verify_ngsl(
            &szilard_grid(50, 1.0, &Protocol::Optimal)?,
            DEFAULT_DEMON_TOLERANCE,
        )?,
    })
}

/// Integrate `scenario` and write its artifacts into `dir`.
pub fn simulate_into(scenario: &Scenario, dir: &Path) -> CliResult<report::RunSummary> {
    let traj = integrate(
        &BlackHole::new(scenario.initial_mass)?,
        &scenario.events,
        &scenario.evolution,
    )?;
    let demon = scenario
        .demon
        .as_ref()
        .map(|g| verify_ngsl(&g.models, g.tolerance))
        .transpose()?;
    let summary = run_summary(scenario, &traj, demon.as_ref());
    write_artifacts(scenario, &traj, &summary, dir)?;
    Ok(summary)
}

fn write_artifacts(
    scenario: &Scenario,
    traj: &Trajectory,
    summary: &report::RunSummary,
    dir: &Path,
) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(io_err(format!("creating {}", dir.display())))?;
    if scenario.output.wants(OutputFormat::Csv) {
        write_file(&dir.join("trajectory.csv"), &trajectory_csv(traj))?;
        write_file(
            &dir.join("events.csv"),
            &events_csv(traj, &scenario.declared_di),
        )?;
    }
    if scenario.output.wants(OutputFormat::Json) {
        write_file(&dir.join("summary.json"), &to_json(summary))?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SweepIndexEntry {
    index: usize,
    directory: String,
    parameters: serde_json::Map<String, serde_json::Value>,
    config_hash: String,
}

#[derive(Debug, Serialize)]
struct SweepIndex {
    schema_version: u32,
    points: Vec<SweepIndexEntry>,
}

pub fn sweep_threads() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

fn run_sweep(points: &[scenario::SweepPoint], dir: &Path) -> CliResult<usize> {
    fs::create_dir_all(dir).map_err(io_err(format!("creating {}", dir.display())))?;
    let names: Vec<String> = (0..points.len()).map(|i| format!("point_{i:04}")).collect();

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = sweep_threads() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| {
        points
            .par_iter()
            .zip(&names)
            .try_for_each(|(p, name)| simulate_into(&p.scenario, &dir.join(name)).map(|_| ()))
    })?;

    let index = SweepIndex {
        schema_version: SCHEMA_VERSION,
        points: points
            .iter()
            .zip(&names)
            .enumerate()
            .map(|(index, (p, name))| SweepIndexEntry {
                index,
                directory: name.clone(),
                parameters: p
                    .parameters
                    .iter()
                    .map(|(k, v)| {
                        (
                            k.clone(),
                            serde_json::to_value(v).unwrap_or(serde_json::Value::Null),
                        )
                    })
                    .collect(),
                config_hash: p.scenario.config_hash(),
            })
            .collect(),
    };
    write_file(&dir.join("sweep_index.json"), &to_json(&index))?;
    Ok(points.len())
}

#[derive(Debug, Serialize)]
pub struct EventReport {
    pub initial_mass: f64,
    pub final_mass: f64,
    pub mode: LedgerMode,
    pub di_sense: f64,
    pub di_carry: f64,
    pub ds_bh: f64,
    pub balance_sense: f64,
    pub balance_carry: f64,
    pub discretization_residual: f64,
    pub shell_mass: f64,
    pub shell_entropy_change: f64,
    pub shell_info_change: f64,
    pub bound: f64,
    pub di: f64,
    pub shell_residual: f64,
}

pub fn single_event(scenario: &Scenario) -> CliResult<EventReport> {
    let event = scenario.events.first().ok_or_else(|| {
        CliError::Usage("the event subcommand needs at least one [[events]] entry".into())
    })?;
    let bh = BlackHole::new(scenario.initial_mass)?;
    let mode = scenario.evolution.ledger_mode;
    let (after, entry) = apply_event(&bh, event, mode, scenario.evolution.mass_floor)?;
    let shell = scenario.evolution.shell_policy.shell_for(&bh)?;
    let dm = entry.dm;
    let bound = channel_width_bound(&shell, dm);
    let di = scenario.declared_di[0].unwrap_or(bound);
    let (di_sense, di_carry) = entry.audit_terms();
    Ok(EventReport {
        initial_mass: bh.mass(),
        final_mass: after.mass(),
        mode,
        di_sense,
        di_carry,
        ds_bh: entry.ds_bh,
        balance_sense: entry.ngsl_balance(Channel::Sense),
        balance_carry: entry.ngsl_balance(Channel::Carry),
        discretization_residual: entry.discretization_residual,
        shell_mass: shell.mass,
        shell_entropy_change: shell_entropy_change(&bh, dm),
        shell_info_change: shell_info_change(&bh, &shell, dm),
        bound,
        di,
        shell_residual: shell_ngsl_residual(&shell, dm, di),
    })
}
