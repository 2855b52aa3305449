//! CSV and JSON artifacts.
//!
//! `trajectory.csv` columns, fixed order:
//! `t,M,T_H,S_bh,I_gM,M_s,cum_budget,event_flag`, reals with 17 significant
//! digits, `event_flag` 1 / −1 / 0 for infall / emission / none.
//!
//! `events.csv` has one row per applied transit, see [`EVENTS_HEADER`].

use std::fmt::Write as _;

use serde::Serialize;

use crate::demon::NgslReport;
use crate::evolution::{cumulative_channel_budget, EventRecord, StopReason, Trajectory};
use crate::ledger::{Channel, Direction};
use crate::shell::shell_ngsl_residual;
use crate::units::{from_natural, Dimension};

use super::scenario::Scenario;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const TRAJECTORY_HEADER: &str = "t,M,T_H,S_bh,I_gM,M_s,cum_budget,event_flag";
pub const EVENTS_HEADER: &str = "t,direction,particle_mass,pre_mass,dM,dI_sense,dI_carry,dS_bh,\
balance_sense,balance_carry,M_s,dS_shell,dI_shell,bound,dI,shell_residual";

/// 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(160 * (traj.samples.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for s in &traj.samples {
        let reals = [
            s.t,
            s.mass,
            s.temperature,
            s.entropy,
            s.information,
            s.shell_mass,
            s.cumulative_budget,
        ];
        for x in reals {
            out.push_str(&fmt_real(x));
            out.push(',');
        }
        let _ = writeln!(out, "{}", s.event_flag);
    }
    out
}

/// The outside observer's information change used to check an event: the
/// declared value, or the bound itself (saturation) when none was declared.
pub fn effective_di(record: &EventRecord, declared: Option<f64>) -> f64 {
    declared.unwrap_or(record.bound)
}

pub fn events_csv(traj: &Trajectory, declared: &[Option<f64>]) -> String {
    let mut out = String::new();
    out.push_str(EVENTS_HEADER);
    out.push('\n');
    for (i, r) in traj.events.iter().enumerate() {
        let di = effective_di(r, declared.get(i).copied().flatten());
        let (sense, carry) = r.entry.audit_terms();
        let direction = match r.event.direction {
            Direction::Infall => "infall",
            Direction::Emission => "emission",
        };
        let reals = [
            r.event.particle_mass,
            r.entry.pre_mass,
            r.entry.dm,
            sense,
            carry,
            r.entry.ds_bh,
            r.entry.ngsl_balance(Channel::Sense),
            r.entry.ngsl_balance(Channel::Carry),
            r.shell.mass,
            r.shell_entropy_change,
            r.shell_info_change,
            r.bound,
            di,
            shell_ngsl_residual(&r.shell, r.entry.dm, di),
        ];
        out.push_str(&fmt_real(r.event.time));
        out.push(',');
        out.push_str(direction);
        for x in reals {
            out.push(',');
            out.push_str(&fmt_real(x));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    fn of(values: impl IntoIterator<Item = f64>) -> Option<Range> {
        values.into_iter().fold(None, |acc, v| {
            Some(match acc {
                None => Range { min: v, max: v },
                Some(r) => Range {
                    min: r.min.min(v),
                    max: r.max.max(v),
                },
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Totals {
    /// S_bh(final) − S_bh(initial) along the trajectory.
    pub delta_s_bh: f64,
    /// Σ ledger dS_bh over transits.
    pub delta_s_bh_events: f64,
    pub delta_s_shell: f64,
    pub delta_i_shell: f64,
    pub net_di_sense: f64,
    pub net_di_carry: f64,
    pub channel_budget: f64,
    pub channel_budget_events: f64,
    /// Continuous-evaporation share of the budget; an extension beyond
    /// per-transit bounds, reported separately.
    pub channel_budget_continuous: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NgslVerdicts {
    pub ledger_balance_sense: Option<Range>,
    pub ledger_balance_carry: Option<Range>,
    pub shell_residual: Option<Range>,
    pub tolerance: f64,
    pub violations: Vec<usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemonSummary {
    pub models: usize,
    pub min_margin: f64,
    pub argmin_error_rate: f64,
    pub saturated: usize,
    pub tolerance: f64,
    pub pass: bool,
}

impl DemonSummary {
    pub fn of(report: &NgslReport) -> Self {
        DemonSummary {
            models: report.evaluations.len(),
            min_margin: report.min_margin,
            argmin_error_rate: report.evaluations[report.argmin].error_rate,
            saturated: report.saturated.len(),
            tolerance: report.tolerance,
            pass: report.pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiLabels {
    pub initial_mass_kg: f64,
    pub final_mass_kg: f64,
    pub final_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub scenario: String,
    pub config_hash: String,
    pub mode: crate::ledger::LedgerMode,
    pub stop_reason: StopReason,
    pub final_time: f64,
    pub final_mass: f64,
    pub samples: usize,
    pub events: usize,
    pub totals: Totals,
    pub ngsl: NgslVerdicts,
    pub demon: Option<DemonSummary>,
    pub si: SiLabels,
    pub accepted_steps: u64,
    pub rejected_steps: u64,
}

/// Absolute tolerance on a residual of magnitude `scale`.
pub fn residual_tolerance(scale: f64) -> f64 {
    1e-12 * scale.abs().max(1.0)
}

pub fn ngsl_verdicts(traj: &Trajectory, declared: &[Option<f64>]) -> NgslVerdicts {
    let mut violations = Vec::new();
    let mut residuals = Vec::with_capacity(traj.events.len());
    let mut tol_max: f64 = 0.0;
    for (i, r) in traj.events.iter().enumerate() {
        let di = effective_di(r, declared.get(i).copied().flatten());
        let residual = shell_ngsl_residual(&r.shell, r.entry.dm, di);
        let tol = residual_tolerance(r.bound.abs().max(di.abs()));
        tol_max = tol_max.max(tol);
        let balance_ok = [Channel::Sense, Channel::Carry]
            .iter()
            .all(|&c| r.entry.ngsl_balance(c) >= -residual_tolerance(r.entry.ds_bh));
        if residual < -tol || !balance_ok {
            violations.push(i);
        }
        residuals.push(residual);
    }
    NgslVerdicts {
        ledger_balance_sense: Range::of(
            traj.events
                .iter()
                .map(|r| r.entry.ngsl_balance(Channel::Sense)),
        ),
        ledger_balance_carry: Range::of(
            traj.events
                .iter()
                .map(|r| r.entry.ngsl_balance(Channel::Carry)),
        ),
        shell_residual: Range::of(residuals),
        tolerance: tol_max.max(residual_tolerance(0.0)),
        pass: violations.is_empty(),
        violations,
    }
}

pub fn run_summary(
    scenario: &Scenario,
    traj: &Trajectory,
    demon: Option<&NgslReport>,
) -> RunSummary {
    let first = traj.samples[0];
    let last = *traj.final_sample();
    let sum = |f: &dyn Fn(&EventRecord) -> f64| traj.events.iter().map(f).sum::<f64>();
    let totals = Totals {
        delta_s_bh: last.entropy - first.entropy,
        delta_s_bh_events: sum(&|r| r.entry.ds_bh),
        delta_s_shell: sum(&|r| r.shell_entropy_change),
        delta_i_shell: sum(&|r| r.shell_info_change),
        net_di_sense: sum(&|r| r.entry.audit_terms().0),
        net_di_carry: sum(&|r| r.entry.audit_terms().1),
        channel_budget: cumulative_channel_budget(traj),
        channel_budget_events: traj.budget_events,
        channel_budget_continuous: traj.budget_continuous,
    };
    let si = |x: f64, d: Dimension| from_natural(x, d).map(|q| q.value).unwrap_or(f64::NAN);
    RunSummary {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        scenario: scenario.name.clone(),
        config_hash: scenario.config_hash(),
        mode: scenario.evolution.ledger_mode,
        stop_reason: traj.stop_reason,
        final_time: last.t,
        final_mass: last.mass,
        samples: traj.samples.len(),
        events: traj.events.len(),
        totals,
        ngsl: ngsl_verdicts(traj, &scenario.declared_di),
        demon: demon.map(DemonSummary::of),
        si: SiLabels {
            initial_mass_kg: si(scenario.initial_mass, Dimension::MASS),
            final_mass_kg: si(last.mass, Dimension::MASS),
            final_time_s: si(last.t, Dimension::TIME),
        },
        accepted_steps: traj.stats.accepted_steps,
        rejected_steps: traj.stats.rejected_steps,
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}
