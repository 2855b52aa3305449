//! C ABI over the `ngsl` library.
//!
//! Every function returns an [`NgslStatus`]; results come back through out
//! pointers. On failure the message is available from
//! [`ngsl_last_error_message`] on the same thread. Handles returned by
//! `ngsl_apply_event` and `ngsl_integrate` must be released with the matching
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ngsl::demon::{evaluate, FeedbackModel, Protocol, MAX_STATES};
use ngsl::evolution::{analytic_lifetime, integrate, EvolutionConfig, StopReason, Trajectory};
use ngsl::ledger::{apply_event, Channel, Direction, LedgerEntry, LedgerMode, TransitEvent};
use ngsl::screen::{gravitational_information_marked, screen_temperature, Radius};
use ngsl::shell::{channel_width_bound, shell_ngsl_residual, Shell, ShellPolicy};
use ngsl::{BlackHole, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NgslStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InsideHorizon = 3,
    BelowFloor = 4,
    ComplementarityViolation = 5,
    Stiffness = 6,
    IndexOutOfRange = 7,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NgslDirection {
    Infall = 0,
    Emission = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NgslLedgerMode {
    Differential = 0,
    Exact = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NgslChannel {
    Sense = 0,
    Carry = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NgslStopReason {
    ReachedEnd = 0,
    MassFloor = 1,
    EventBelowFloor = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgslTransit {
    pub time: f64,
    pub particle_mass: f64,
    pub direction: NgslDirection,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NgslSample {
    pub t: f64,
    pub mass: f64,
    pub temperature: f64,
    pub entropy: f64,
    pub information: f64,
    pub shell_mass: f64,
    pub cumulative_budget: f64,
    pub event_flag: i8,
}

/// Opaque ledger entry.
pub struct NgslLedgerEntry(LedgerEntry);

/// Opaque integrated trajectory.
pub struct NgslTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(NgslStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InsideHorizon { .. } => NgslStatus::InsideHorizon,
            Error::EvaporatedPastZero { .. } | Error::EvaporatedPastFloor { .. } => {
                NgslStatus::BelowFloor
            }
            Error::ComplementarityViolation { .. } => NgslStatus::ComplementarityViolation,
            Error::Stiffness { .. } => NgslStatus::Stiffness,
            _ => NgslStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(NgslStatus::NullPointer, format!("`{name}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NgslStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NgslStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            NgslStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_f64(out: *mut f64, value: f64) -> Result<(), Failure> {
    write(out, "out", value)
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ngsl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn ngsl_clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ngsl_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version string"),
        };
    VERSION.as_ptr()
}

/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn ngsl_hawking_temperature(mass: f64, out: *mut f64) -> NgslStatus {
    guard(|| write_f64(out, BlackHole::new(mass)?.hawking_temperature()))
}

/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn ngsl_entropy(mass: f64, out: *mut f64) -> NgslStatus {
    guard(|| write_f64(out, BlackHole::new(mass)?.entropy()))
}

/// M / T_H.
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn ngsl_gravitational_information(mass: f64, out: *mut f64) -> NgslStatus {
    guard(|| write_f64(out, BlackHole::new(mass)?.gravitational_information()))
}

fn radius(r: f64) -> Radius {
    if r == 0.0 {
        Radius::Horizon
    } else {
        Radius::At(r)
    }
}

/// Screen temperature at areal radius `r`; `r == 0` selects the horizon.
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn ngsl_screen_temperature(mass: f64, r: f64, out: *mut f64) -> NgslStatus {
    guard(|| write_f64(out, screen_temperature(&BlackHole::new(mass)?, radius(r))?))
}

/// m / T_hs for a marked mass `m` at radius `r` (`r == 0`: horizon).
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn ngsl_marked_information(
    m: f64,
    mass: f64,
    r: f64,
    out: *mut f64,
) -> NgslStatus {
    guard(|| {
        let bh = BlackHole::new(mass)?;
        write_f64(out, gravitational_information_marked(m, &bh, radius(r))?)
    })
}

fn shell(mass: f64, shell_mass: f64) -> Result<Shell, Failure> {
    Ok(Shell::with_mass(&BlackHole::new(mass)?, shell_mass)?)
}

/// −8π·M_s·dM.
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn ngsl_channel_width_bound(
    shell_mass: f64,
    dm: f64,
    out: *mut f64,
) -> NgslStatus {
    guard(|| {
        if !dm.is_finite() {
            return Err(Failure(NgslStatus::InvalidArgument, format!("dm = {dm}")));
        }
        write_f64(out, channel_width_bound(&shell(1.0, shell_mass)?, dm))
    })
}

/// Bound minus `di`; negative means the transit violates the bound.
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn ngsl_shell_residual(
    shell_mass: f64,
    dm: f64,
    di: f64,
    out: *mut f64,
) -> NgslStatus {
    guard(|| {
        if !(dm.is_finite() && di.is_finite()) {
            return Err(Failure(
                NgslStatus::InvalidArgument,
                format!("dm = {dm}, di = {di}"),
            ));
        }
        write_f64(out, shell_ngsl_residual(&shell(1.0, shell_mass)?, dm, di))
    })
}

/// M0³ / (3 alpha).
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn ngsl_analytic_lifetime(m0: f64, alpha: f64, out: *mut f64) -> NgslStatus {
    guard(|| {
        BlackHole::new(m0)?;
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Failure(
                NgslStatus::InvalidArgument,
                format!("alpha = {alpha} must be > 0"),
            ));
        }
        write_f64(out, analytic_lifetime(m0, alpha))
    })
}

fn transit(t: &NgslTransit) -> Result<TransitEvent, Failure> {
    let direction = match t.direction {
        NgslDirection::Infall => Direction::Infall,
        NgslDirection::Emission => Direction::Emission,
    };
    Ok(TransitEvent::new(t.time, t.particle_mass, direction)?)
}

fn mode(m: NgslLedgerMode) -> LedgerMode {
    match m {
        NgslLedgerMode::Differential => LedgerMode::Differential,
        NgslLedgerMode::Exact => LedgerMode::Exact,
    }
}

fn channel(c: NgslChannel) -> Channel {
    match c {
        NgslChannel::Sense => Channel::Sense,
        NgslChannel::Carry => Channel::Carry,
    }
}

/// Apply one transit to a hole of mass `mass`.
///
/// # Safety
/// `event` must point to a valid `NgslTransit`; `out_entry` and `out_mass`
/// must be valid for writes. The returned entry is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn ngsl_apply_event(
    mass: f64,
    event: *const NgslTransit,
    ledger_mode: NgslLedgerMode,
    mass_floor: f64,
    out_entry: *mut *mut NgslLedgerEntry,
    out_mass: *mut f64,
) -> NgslStatus {
    guard(|| {
        let event = event.as_ref().ok_or_else(|| null("event"))?;
        if out_entry.is_null() {
            return Err(null("out_entry"));
        }
        if out_mass.is_null() {
            return Err(null("out_mass"));
        }
        let (after, entry) = apply_event(
            &BlackHole::new(mass)?,
            &transit(event)?,
            mode(ledger_mode),
            mass_floor,
        )?;
        out_mass.write(after.mass());
        out_entry.write(Box::into_raw(Box::new(NgslLedgerEntry(entry))));
        Ok(())
    })
}

/// Read one information channel. Reading the other channel of the same entry
/// afterwards fails with `ComplementarityViolation`.
///
/// # Safety
/// `entry` must come from `ngsl_apply_event` and not be freed; `out` must be
/// valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn ngsl_ledger_entry_observe(
    entry: *mut NgslLedgerEntry,
    which: NgslChannel,
    out: *mut f64,
) -> NgslStatus {
    guard(|| {
        let entry = entry.as_mut().ok_or_else(|| null("entry"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let value = entry.0.observe(channel(which))?;
        out.write(value);
        Ok(())
    })
}

/// dS − dI for a channel, without counting as an observation.
///
/// # Safety
/// `entry` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ngsl_ledger_entry_balance(
    entry: *const NgslLedgerEntry,
    which: NgslChannel,
    out: *mut f64,
) -> NgslStatus {
    guard(|| {
        let entry = entry.as_ref().ok_or_else(|| null("entry"))?;
        write_f64(out, entry.0.ngsl_balance(channel(which)))
    })
}

/// Black-hole entropy change booked by the entry.
///
/// # Safety
/// `entry` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ngsl_ledger_entry_entropy_change(
    entry: *const NgslLedgerEntry,
    out: *mut f64,
) -> NgslStatus {
    guard(|| {
        let entry = entry.as_ref().ok_or_else(|| null("entry"))?;
        write_f64(out, entry.0.ds_bh)
    })
}

/// # Safety
/// `entry` must be NULL or a handle from `ngsl_apply_event` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ngsl_ledger_entry_free(entry: *mut NgslLedgerEntry) {
    if !entry.is_null() {
        drop(Box::from_raw(entry));
    }
}

/// Integrate evaporation from `m0` with the given transits, sorted by time.
///
/// `mass_floor`, `t_end` and `shell_mass` take their defaults when `<= 0`;
/// `t_end` is required when `alpha == 0`.
/// A positive `shell_mass` fixes the shell mass; otherwise the default disk
/// profile is used.
///
/// # Safety
/// `events` must point to `n_events` valid transits (or be NULL when
/// `n_events == 0`); `out` must be valid for a write. The returned trajectory
/// is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn ngsl_integrate(
    m0: f64,
    alpha: f64,
    mass_floor: f64,
    t_end: f64,
    shell_mass: f64,
    events: *const NgslTransit,
    n_events: usize,
    out: *mut *mut NgslTrajectory,
) -> NgslStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let bh = BlackHole::new(m0)?;
        let mut cfg = EvolutionConfig::for_mass(m0);
        cfg.alpha = alpha;
        if mass_floor > 0.0 {
            cfg.mass_floor = mass_floor;
        }
        if t_end > 0.0 {
            cfg.t_end = t_end;
        } else if alpha > 0.0 {
            cfg.t_end = 1.1 * analytic_lifetime(m0, alpha);
        } else {
            return Err(Failure(
                NgslStatus::InvalidArgument,
                "t_end must be given when alpha = 0".into(),
            ));
        }
        if shell_mass > 0.0 {
            cfg.shell_policy = ShellPolicy::Fixed { mass: shell_mass };
        }
        let transits = if n_events == 0 {
            Vec::new()
        } else {
            if events.is_null() {
                return Err(null("events"));
            }
            std::slice::from_raw_parts(events, n_events)
                .iter()
                .map(transit)
                .collect::<Result<Vec<_>, _>>()?
        };
        let traj = integrate(&bh, &transits, &cfg)?;
        out.write(Box::into_raw(Box::new(NgslTrajectory(traj))));
        Ok(())
    })
}

/// # Safety
/// `traj` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ngsl_trajectory_len(
    traj: *const NgslTrajectory,
    out: *mut usize,
) -> NgslStatus {
    guard(|| {
        let traj = traj.as_ref().ok_or_else(|| null("traj"))?;
        write(out, "out", traj.0.samples.len())
    })
}

/// # Safety
/// `traj` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ngsl_trajectory_sample(
    traj: *const NgslTrajectory,
    index: usize,
    out: *mut NgslSample,
) -> NgslStatus {
    guard(|| {
        let traj = traj.as_ref().ok_or_else(|| null("traj"))?;
        let s = traj.0.samples.get(index).ok_or_else(|| {
            Failure(
                NgslStatus::IndexOutOfRange,
                format!("index {index} >= {}", traj.0.samples.len()),
            )
        })?;
        write(
            out,
            "out",
            NgslSample {
                t: s.t,
                mass: s.mass,
                temperature: s.temperature,
                entropy: s.entropy,
                information: s.information,
                shell_mass: s.shell_mass,
                cumulative_budget: s.cumulative_budget,
                event_flag: s.event_flag,
            },
        )
    })
}

/// # Safety
/// `traj` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ngsl_trajectory_stop_reason(
    traj: *const NgslTrajectory,
    out: *mut NgslStopReason,
) -> NgslStatus {
    guard(|| {
        let traj = traj.as_ref().ok_or_else(|| null("traj"))?;
        let reason = match traj.0.stop_reason {
            StopReason::ReachedEnd => NgslStopReason::ReachedEnd,
            StopReason::MassFloor => NgslStopReason::MassFloor,
            StopReason::EventBelowFloor => NgslStopReason::EventBelowFloor,
        };
        write(out, "out", reason)
    })
}

/// Cumulative channel budget: per-transit bounds plus the continuous share.
///
/// # Safety
/// `traj` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ngsl_trajectory_budget(
    traj: *const NgslTrajectory,
    out: *mut f64,
) -> NgslStatus {
    guard(|| {
        let traj = traj.as_ref().ok_or_else(|| null("traj"))?;
        write_f64(out, ngsl::evolution::cumulative_channel_budget(&traj.0))
    })
}

/// # Safety
/// `traj` must be NULL or a handle from `ngsl_integrate` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ngsl_trajectory_free(traj: *mut NgslTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

unsafe fn write_evaluation(
    model: &FeedbackModel,
    out_margin: *mut f64,
    out_information: *mut f64,
) -> Result<(), Failure> {
    if out_margin.is_null() {
        return Err(null("out_margin"));
    }
    let e = evaluate(model)?;
    out_margin.write(e.margin);
    if !out_information.is_null() {
        out_information.write(e.mutual_information);
    }
    Ok(())
}

/// dS − dI and the mutual information of the uniform binary engine with
/// measurement error `error_rate` under the optimal protocol.
///
/// # Safety
/// `out_margin` must be valid for a write; `out_information` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn ngsl_szilard_margin(
    error_rate: f64,
    bath_temperature: f64,
    out_margin: *mut f64,
    out_information: *mut f64,
) -> NgslStatus {
    guard(|| {
        let model = FeedbackModel::szilard(error_rate, bath_temperature, &Protocol::Optimal)?;
        write_evaluation(&model, out_margin, out_information)
    })
}

/// dS − dI for an `n`-state model with an explicit row-major work table
/// `work[x * n + y]`.
///
/// # Safety
/// `prior` must point to `n` doubles and `work` to `n * n` doubles;
/// `out_margin` must be valid for a write; `out_information` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn ngsl_demon_margin(
    prior: *const f64,
    n: usize,
    error_rate: f64,
    bath_temperature: f64,
    work: *const f64,
    out_margin: *mut f64,
    out_information: *mut f64,
) -> NgslStatus {
    guard(|| {
        if prior.is_null() {
            return Err(null("prior"));
        }
        if work.is_null() {
            return Err(null("work"));
        }
        if !(2..=MAX_STATES).contains(&n) {
            return Err(Failure(
                NgslStatus::InvalidArgument,
                format!("n = {n} must lie in 2..={MAX_STATES}"),
            ));
        }
        let prior = std::slice::from_raw_parts(prior, n).to_vec();
        let table = std::slice::from_raw_parts(work, n * n)
            .chunks(n)
            .map(<[f64]>::to_vec)
            .collect();
        let model = FeedbackModel::new(
            prior,
            error_rate,
            bath_temperature,
            &Protocol::Table { work: table },
        )?;
        write_evaluation(&model, out_margin, out_information)
    })
}
