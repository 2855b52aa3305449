//! Mass evolution under Hawking evaporation, dM/dt = −α/M², with scheduled
//! horizon transits applied between integration steps.
//!
//! The integrator is the Runge–Kutta–Fehlberg 4(5) pair propagating the
//! fourth-order solution. It never steps across an event time, so each transit
//! sees the exact pre-event mass. Time is accumulated with a compensated sum:
//! near the end of evaporation the local time scale M³/α falls far below the
//! resolution of `t`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ledger::{apply_event, LedgerEntry, LedgerMode, TransitEvent};
use crate::shell::{
    channel_width_bound, shell_entropy_change, shell_info_change, DiskProfile, Shell, ShellPolicy,
};
use crate::{BlackHole, Error, Result, EIGHT_PI};

/// Photon-sector evaporation coefficient 1/(15360π) in geometric units.
pub const DEFAULT_ALPHA: f64 = 1.0 / (15360.0 * PI);

/// Default floor as a fraction of the initial mass.
pub const DEFAULT_FLOOR_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub alpha: f64,
    pub mass_floor: f64,
    pub t_end: f64,
    pub step_control: StepControl,
    pub shell_policy: ShellPolicy,
    pub ledger_mode: LedgerMode,
}

impl EvolutionConfig {
    /// Defaults for a hole of initial mass `m0`: photon-sector α, floor 10⁻⁶·M0,
    /// and a horizon slightly past the analytic lifetime.
    pub fn for_mass(m0: f64) -> Self {
        let mass_floor = DEFAULT_FLOOR_FRACTION * m0;
        EvolutionConfig {
            alpha: DEFAULT_ALPHA,
            mass_floor,
            t_end: 1.1 * analytic_lifetime(m0, DEFAULT_ALPHA),
            step_control: StepControl {
                rel_tol: 1e-10,
                abs_tol: 1e-9 * mass_floor,
                max_step: f64::INFINITY,
            },
            shell_policy: ShellPolicy::Disk {
                profile: DiskProfile {
                    sigma0: 1e-3,
                    r_ref: 2.0 * m0,
                    p: 0.0,
                    r_outer_max: 100.0 * m0,
                },
                window: m0,
            },
            ledger_mode: LedgerMode::Differential,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return fail(format!("alpha = {} must be finite and >= 0", self.alpha));
        }
        if !(self.mass_floor.is_finite() && self.mass_floor > 0.0) {
            return fail(format!("mass_floor = {} must be > 0", self.mass_floor));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return fail(format!("t_end = {} must be finite and > 0", self.t_end));
        }
        let sc = &self.step_control;
        if !(sc.rel_tol > 0.0 && sc.rel_tol.is_finite()) {
            return fail(format!("rel_tol = {} must be > 0", sc.rel_tol));
        }
        if !(sc.abs_tol > 0.0 && sc.abs_tol.is_finite()) {
            return fail(format!("abs_tol = {} must be > 0", sc.abs_tol));
        }
        if !(sc.max_step > 0.0) {
            return fail(format!("max_step = {} must be > 0", sc.max_step));
        }
        self.shell_policy.validate()
    }
}

/// dM/dt = −α/M².
pub fn evaporation_rate(mass: f64, alpha: f64, mass_floor: f64) -> Result<f64> {
    if !(mass >= mass_floor) {
        return Err(Error::EvaporatedPastFloor {
            remaining: mass,
            floor: mass_floor,
        });
    }
    Ok(-alpha / (mass * mass))
}

/// Time for dM/dt = −α/M² to take M0 to zero: M0³ / (3α).
pub fn analytic_lifetime(m0: f64, alpha: f64) -> f64 {
    m0 * m0 * m0 / (3.0 * alpha)
}

/// Closed-form time to go from `m0` down to `floor`.
pub fn analytic_time_to_floor(m0: f64, floor: f64, alpha: f64) -> f64 {
    let ratio = floor / m0;
    analytic_lifetime(m0, alpha) * (1.0 - ratio * ratio * ratio)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ReachedEnd,
    MassFloor,
    /// An emission event would have taken the hole below the floor.
    EventBelowFloor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub mass: f64,
    pub temperature: f64,
    pub entropy: f64,
    pub information: f64,
    pub shell_mass: f64,
    pub cumulative_budget: f64,
    /// 1 for an infall, −1 for an emission, 0 for a plain integration sample.
    pub event_flag: i8,
}

impl Sample {
    fn new(
        t: f64,
        bh: &BlackHole,
        shell_mass: f64,
        cumulative_budget: f64,
        event_flag: i8,
    ) -> Self {
        Sample {
            t,
            mass: bh.mass(),
            temperature: bh.hawking_temperature(),
            entropy: bh.entropy(),
            information: bh.gravitational_information(),
            shell_mass,
            cumulative_budget,
            event_flag,
        }
    }
}

/// A transit as it was applied during integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub sample_index: usize,
    pub event: TransitEvent,
    pub entry: LedgerEntry,
    pub shell: Shell,
    pub bound: f64,
    pub shell_entropy_change: f64,
    pub shell_info_change: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Stats {
    pub accepted_steps: u64,
    pub rejected_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<EventRecord>,
    pub stop_reason: StopReason,
    /// Σ of per-event bounds −8π·M_s·dM.
    pub budget_events: f64,
    /// ∫ −M_s·d(1/T_H) along continuous evaporation.
    pub budget_continuous: f64,
    pub stats: Stats,
}

impl Trajectory {
    pub fn final_sample(&self) -> &Sample {
        self.samples
            .last()
            .expect("trajectory has an initial sample")
    }

    /// Time at which the floor was reached, if it was.
    pub fn time_to_floor(&self) -> Option<f64> {
        (self.stop_reason == StopReason::MassFloor).then(|| self.final_sample().t)
    }
}

pub fn cumulative_channel_budget(traj: &Trajectory) -> f64 {
    traj.budget_events + traj.budget_continuous
}

/// t as an unevaluated sum hi + lo.
#[derive(Debug, Clone, Copy)]
struct CompensatedTime {
    hi: f64,
    lo: f64,
}

impl CompensatedTime {
    fn at(t: f64) -> Self {
        CompensatedTime { hi: t, lo: 0.0 }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }

    fn until(self, target: f64) -> f64 {
        (target - self.hi) - self.lo
    }

    fn advance(&mut self, h: f64) {
        // TwoSum
        let s = self.hi + h;
        let bp = s - self.hi;
        let err = (self.hi - (s - bp)) + (h - bp);
        self.lo += err;
        let hi = s + self.lo;
        self.lo -= hi - s;
        self.hi = hi;
    }
}

// Fehlberg 4(5) tableau. The system is autonomous, so the nodes c_i are not needed.
const A21: f64 = 1.0 / 4.0;
const A31: f64 = 3.0 / 32.0;
const A32: f64 = 9.0 / 32.0;
const A41: f64 = 1932.0 / 2197.0;
const A42: f64 = -7200.0 / 2197.0;
const A43: f64 = 7296.0 / 2197.0;
const A51: f64 = 439.0 / 216.0;
const A52: f64 = -8.0;
const A53: f64 = 3680.0 / 513.0;
const A54: f64 = -845.0 / 4104.0;
const A61: f64 = -8.0 / 27.0;
const A62: f64 = 2.0;
const A63: f64 = -3544.0 / 2565.0;
const A64: f64 = 1859.0 / 4104.0;
const A65: f64 = -11.0 / 40.0;
const B4: [f64; 6] = [
    25.0 / 216.0,
    0.0,
    1408.0 / 2565.0,
    2197.0 / 4104.0,
    -1.0 / 5.0,
    0.0,
];
const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// One RKF4(5) step of an autonomous scalar ODE. Returns (y4, y5 − y4), or
/// `None` if a stage leaves the domain of `f`.
fn rkf45_step(f: impl Fn(f64) -> Option<f64>, y: f64, h: f64) -> Option<(f64, f64)> {
    let k1 = f(y)?;
    let k2 = f(y + h * A21 * k1)?;
    let k3 = f(y + h * (A31 * k1 + A32 * k2))?;
    let k4 = f(y + h * (A41 * k1 + A42 * k2 + A43 * k3))?;
    let k5 = f(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))?;
    let k6 = f(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))?;
    let k = [k1, k2, k3, k4, k5, k6];
    let dot = |b: &[f64; 6]| b.iter().zip(&k).map(|(b, k)| b * k).sum::<f64>();
    let y4 = y + h * dot(&B4);
    let y5 = y + h * dot(&B5);
    (y4.is_finite() && y5.is_finite()).then_some((y4, y5 - y4))
}

struct Driver<'a> {
    cfg: &'a EvolutionConfig,
    samples: Vec<Sample>,
    events: Vec<EventRecord>,
    budget_events: f64,
    budget_continuous: f64,
    stats: Stats,
}

impl Driver<'_> {
    fn shell_mass(&self, bh: &BlackHole) -> Result<f64> {
        Ok(self.cfg.shell_policy.shell_for(bh)?.mass)
    }

    fn cumulative(&self) -> f64 {
        self.budget_events + self.budget_continuous
    }

    /// Push a sample, keeping t strictly increasing: a sample at the same
    /// (rounded) time as the previous one replaces it.
    fn record(&mut self, t: f64, bh: &BlackHole, shell_mass: f64, flag: i8) {
        let sample = Sample::new(t, bh, shell_mass, self.cumulative(), flag);
        match self.samples.last_mut() {
            Some(last) if last.t >= t => {
                let keep_flag = if flag == 0 { last.event_flag } else { flag };
                *last = Sample {
                    t: last.t,
                    event_flag: keep_flag,
                    ..sample
                };
            }
            _ => self.samples.push(sample),
        }
    }
}

/// Integrate `bh0` from t = 0 to `cfg.t_end` or the mass floor.
///
/// `events` must be sorted by time with every time in [0, t_end).
pub fn integrate(
    bh0: &BlackHole,
    events: &[TransitEvent],
    cfg: &EvolutionConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    validate_schedule(events, cfg.t_end)?;
    if bh0.mass() < cfg.mass_floor {
        return Err(Error::EvaporatedPastFloor {
            remaining: bh0.mass(),
            floor: cfg.mass_floor,
        });
    }

    let alpha = cfg.alpha;
    let floor = cfg.mass_floor;
    let sc = cfg.step_control;
    let rhs = |m: f64| (m > 0.0).then(|| -alpha / (m * m));

    let mut drv = Driver {
        cfg,
        samples: Vec::new(),
        events: Vec::new(),
        budget_events: 0.0,
        budget_continuous: 0.0,
        stats: Stats::default(),
    };

    let mut bh = *bh0;
    let mut t = CompensatedTime::at(0.0);
    let mut shell_mass = drv.shell_mass(&bh)?;
    drv.record(0.0, &bh, shell_mass, 0);

    let mut h = initial_step(bh.mass(), alpha, cfg);
    let mut next_event = 0;

    let stop_reason = 'outer: loop {
        while next_event < events.len() && events[next_event].time <= t.value() {
            let event = events[next_event];
            next_event += 1;
            let shell = cfg.shell_policy.shell_for(&bh)?;
            let (after, entry) = match apply_event(&bh, &event, cfg.ledger_mode, floor) {
                Ok(v) => v,
                Err(Error::EvaporatedPastFloor { .. }) => break 'outer StopReason::EventBelowFloor,
                Err(e) => return Err(e),
            };
            let dm = event.mass_change();
            let bound = channel_width_bound(&shell, dm);
            drv.budget_events += bound;
            let record = EventRecord {
                sample_index: 0,
                event,
                shell,
                bound,
                shell_entropy_change: shell_entropy_change(&bh, dm),
                shell_info_change: shell_info_change(&bh, &shell, dm),
                entry,
            };
            bh = after;
            shell_mass = drv.shell_mass(&bh)?;
            let flag = match event.direction {
                crate::ledger::Direction::Infall => 1,
                crate::ledger::Direction::Emission => -1,
            };
            drv.record(event.time, &bh, shell_mass, flag);
            drv.events.push(EventRecord {
                sample_index: drv.samples.len() - 1,
                ..record
            });
        }

        let remaining = t.until(cfg.t_end);
        if remaining <= 0.0 {
            break StopReason::ReachedEnd;
        }
        let target = events
            .get(next_event)
            .map_or(cfg.t_end, |e| e.time.min(cfg.t_end));
        let to_target = t.until(target);

        h = h.min(sc.max_step);
        let landing = h >= to_target;
        if landing {
            h = to_target;
        }

        let m = bh.mass();
        let attempt = rkf45_step(rhs, m, h);
        let accepted = attempt.and_then(|(y4, err)| {
            let scale = sc.abs_tol + sc.rel_tol * m.abs().max(y4.abs());
            let ratio = (err / scale).abs();
            (ratio <= 1.0).then_some((y4, ratio))
        });

        let Some((y_new, ratio)) = accepted else {
            drv.stats.rejected_steps += 1;
            let shrink = match attempt {
                Some((y4, err)) => {
                    let scale = sc.abs_tol + sc.rel_tol * m.abs().max(y4.abs());
                    (SAFETY * (err / scale).abs().powf(-0.2)).clamp(MIN_FACTOR, 1.0)
                }
                None => 0.25,
            };
            h *= shrink;
            check_underflow(t.value(), m, h, alpha)?;
            continue;
        };
        drv.stats.accepted_steps += 1;

        if y_new < floor {
            let h_floor = bisect_floor(rhs, m, floor, h);
            let ms_floor = drv.shell_mass(&BlackHole::new(floor)?)?;
            drv.budget_continuous += continuous_budget(shell_mass, ms_floor, m, floor);
            t.advance(h_floor);
            bh = BlackHole::new(floor)?;
            drv.record(t.value(), &bh, ms_floor, 0);
            break StopReason::MassFloor;
        }

        let bh_new = BlackHole::new(y_new)?;
        let ms_new = drv.shell_mass(&bh_new)?;
        drv.budget_continuous += continuous_budget(shell_mass, ms_new, m, y_new);
        if landing {
            t = CompensatedTime::at(target);
        } else {
            t.advance(h);
        }
        bh = bh_new;
        shell_mass = ms_new;
        drv.record(t.value(), &bh, shell_mass, 0);

        let grow = if ratio == 0.0 {
            MAX_FACTOR
        } else {
            (SAFETY * ratio.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
        };
        // a landing step was shortened, so do not let it shrink the next one
        h = if landing { h.max(h * grow) } else { h * grow };
    };

    Ok(Trajectory {
        samples: drv.samples,
        events: drv.events,
        stop_reason,
        budget_events: drv.budget_events,
        budget_continuous: drv.budget_continuous,
        stats: drv.stats,
    })
}

/// −M_s·Δ(1/T_H) over one step, with the shell mass averaged over its end points.
fn continuous_budget(ms_before: f64, ms_after: f64, m_before: f64, m_after: f64) -> f64 {
    -EIGHT_PI * 0.5 * (ms_before + ms_after) * (m_after - m_before)
}

fn validate_schedule(events: &[TransitEvent], t_end: f64) -> Result<()> {
    for (i, ev) in events.iter().enumerate() {
        if !(ev.time >= 0.0 && ev.time < t_end) {
            return Err(Error::InvalidSchedule(format!(
                "event {i} at t = {} is outside [0, t_end = {t_end})",
                ev.time
            )));
        }
        if !(ev.particle_mass > 0.0 && ev.particle_mass.is_finite()) {
            return Err(Error::InvalidMass(ev.particle_mass));
        }
        if i > 0 && ev.time < events[i - 1].time {
            return Err(Error::InvalidSchedule(format!(
                "event {i} at t = {} precedes event {} at t = {}",
                ev.time,
                i - 1,
                events[i - 1].time
            )));
        }
    }
    Ok(())
}

fn initial_step(m: f64, alpha: f64, cfg: &EvolutionConfig) -> f64 {
    let mut h = cfg.t_end.min(cfg.step_control.max_step);
    if alpha > 0.0 {
        let time_scale = m * m * m / alpha;
        h = h.min(1e-3 * time_scale);
    }
    h
}

/// A step is hopeless once it is negligible against the local time scale M³/α.
fn check_underflow(t: f64, m: f64, h: f64, alpha: f64) -> Result<()> {
    if alpha == 0.0 {
        return Ok(());
    }
    if !(h > 1e-14 * m * m * m / alpha) {
        return Err(Error::Stiffness {
            t,
            mass: m,
            step: h,
        });
    }
    Ok(())
}

/// Step length at which the fourth-order solution hits `floor`.
fn bisect_floor(rhs: impl Fn(f64) -> Option<f64> + Copy, m: f64, floor: f64, h: f64) -> f64 {
    let below = |step: f64| match rkf45_step(rhs, m, step) {
        Some((y4, _)) => y4 <= floor,
        None => true,
    };
    let (mut lo, mut hi) = (0.0, h);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
