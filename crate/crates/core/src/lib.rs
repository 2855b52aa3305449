//! Black-hole information bookkeeping in natural units (G = c = ħ = k_B = 1).
//!
//! The crate is organised bottom-up:
//!
//! * [`units`] converts between natural units and SI at the I/O boundary.
//! * [`schwarzschild`] holds the closed-form thermodynamics of a Schwarzschild hole.
//! * [`screen`] evaluates the holographic-screen temperature and the gravitational
//!   information of a marked mass at finite radius.
//! * [`ledger`] processes horizon transits through the two-channel information ledger.
//! * [`shell`] models the causally affected near-horizon disk and the channel-width bound.
//! * [`evolution`] integrates Hawking evaporation with scheduled transits.
//! * [`demon`] checks `dS - dI >= 0` exhaustively on measurement-feedback engines.
//! * [`cli`] parses scenarios and writes CSV/JSON artifacts for the `ngsl` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod demon;
pub mod error;
pub mod evolution;
pub mod ledger;
pub mod schwarzschild;
pub mod screen;
pub mod shell;
pub mod units;

pub use error::{Error, Result};
pub use schwarzschild::BlackHole;

/// 8π, the factor relating a mass change to the change of 1/T_H.
pub const EIGHT_PI: f64 = 8.0 * std::f64::consts::PI;
