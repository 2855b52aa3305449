//! The shell of a black hole: the part of the near-horizon accretion disk that
//! is causally affected while a particle crosses the horizon.
//!
//! Sign convention: `di` is the change of an outside observer's information
//! about the transiting particle, so a loss is negative.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ledger::first_order;
use crate::{BlackHole, Error, Result};

/// Truncated power-law surface density Σ(r) = sigma0 · (r / r_ref)^(−p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskProfile {
    pub sigma0: f64,
    pub r_ref: f64,
    pub p: f64,
    pub r_outer_max: f64,
}

impl DiskProfile {
    pub fn new(sigma0: f64, r_ref: f64, p: f64, r_outer_max: f64) -> Result<Self> {
        let profile = DiskProfile {
            sigma0,
            r_ref,
            p,
            r_outer_max,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidProfile(msg));
        if !(self.sigma0.is_finite() && self.sigma0 >= 0.0) {
            return fail(format!("sigma0 = {} must be finite and >= 0", self.sigma0));
        }
        if !(self.r_ref.is_finite() && self.r_ref > 0.0) {
            return fail(format!("r_ref = {} must be finite and > 0", self.r_ref));
        }
        if !self.p.is_finite() {
            return fail(format!("p = {} must be finite", self.p));
        }
        if !(self.r_outer_max > self.r_ref) {
            return fail(format!(
                "r_outer_max = {} must exceed r_ref = {}",
                self.r_outer_max, self.r_ref
            ));
        }
        Ok(())
    }

    pub fn surface_density(&self, r: f64) -> f64 {
        self.sigma0 * (r / self.r_ref).powf(-self.p)
    }

    /// ∫ Σ(r) 2πr dr over [inner, outer], in closed form.
    pub fn annulus_mass(&self, inner: f64, outer: f64) -> f64 {
        if outer <= inner || self.sigma0 == 0.0 {
            return 0.0;
        }
        // ∫ r^(1−p) dr = a^(2−p) · ln(b/a) · expm1(x)/x with x = (2−p)·ln(b/a);
        // this form stays accurate through p = 2
        let log_ratio = (outer / inner).ln();
        let x = (2.0 - self.p) * log_ratio;
        let phi = if x.abs() < 1e-300 {
            1.0
        } else {
            x.exp_m1() / x
        };
        let scaled = (inner / self.r_ref).powf(2.0 - self.p);
        2.0 * PI * self.sigma0 * self.r_ref * self.r_ref * scaled * log_ratio * phi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub mass: f64,
    pub r_inner: f64,
    pub r_outer: f64,
    pub window: f64,
}

impl Shell {
    /// A shell of prescribed mass, independent of any disk profile.
    pub fn with_mass(bh: &BlackHole, mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::InvalidMass(mass));
        }
        Ok(Shell {
            mass,
            r_inner: bh.horizon_radius(),
            r_outer: bh.horizon_radius(),
            window: 0.0,
        })
    }
}

/// The disk annulus reachable by a unit-speed signal from the horizon within `window`.
pub fn build_shell(bh: &BlackHole, profile: &DiskProfile, window: f64) -> Result<Shell> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::InvalidWindow(window));
    }
    let r_inner = bh.horizon_radius();
    let r_outer = (r_inner + window).min(profile.r_outer_max).max(r_inner);
    Ok(Shell {
        mass: profile.annulus_mass(r_inner, r_outer),
        r_inner,
        r_outer,
        window,
    })
}

/// How the evolution driver obtains the shell at each transit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShellPolicy {
    /// Rebuild from a disk profile and causal window around the current horizon.
    Disk { profile: DiskProfile, window: f64 },
    /// Hold the shell mass constant.
    Fixed { mass: f64 },
}

impl ShellPolicy {
    pub fn validate(&self) -> Result<()> {
        match self {
            ShellPolicy::Disk { profile, window } => {
                profile.validate()?;
                if !(window.is_finite() && *window > 0.0) {
                    return Err(Error::InvalidWindow(*window));
                }
            }
            ShellPolicy::Fixed { mass } => {
                if !(mass.is_finite() && *mass >= 0.0) {
                    return Err(Error::InvalidMass(*mass));
                }
            }
        }
        Ok(())
    }

    pub fn shell_for(&self, bh: &BlackHole) -> Result<Shell> {
        match self {
            ShellPolicy::Disk { profile, window } => build_shell(bh, profile, *window),
            ShellPolicy::Fixed { mass } => Shell::with_mass(bh, *mass),
        }
    }
}

/// dS of the exterior: dM_s / T_H with dM_s = −dM.
pub fn shell_entropy_change(bh: &BlackHole, dm: f64) -> f64 {
    -first_order(bh.mass(), dm)
}

/// Change of the shell's gravitational information:
/// M_s·Δ(1/T_H) + dM_s/T_H = 8π·M_s·dM − 8π·M·dM.
pub fn shell_info_change(bh: &BlackHole, shell: &Shell, dm: f64) -> f64 {
    first_order(shell.mass, dm) - first_order(bh.mass(), dm)
}

/// Upper bound on `di` per transit: −M_s·Δ(1/T_H) = −8π·M_s·dM.
pub fn channel_width_bound(shell: &Shell, dm: f64) -> f64 {
    -first_order(shell.mass, dm)
}

/// dS_shell − dI_shell − dI, reduced to `bound − di`.
///
/// Non-negative exactly when `di` respects [`channel_width_bound`].
/// The hole's mass cancels between the exterior entropy and the shell
/// information, so it does not appear here.
pub fn shell_ngsl_residual(shell: &Shell, dm: f64, di: f64) -> f64 {
    channel_width_bound(shell, dm) - di
}
