//! Closed-form thermodynamics of a Schwarzschild black hole.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, EIGHT_PI};

use std::f64::consts::PI;

/// A Schwarzschild hole, characterised by its mass alone.
///
/// The evaporation floor is enforced by callers; here the only requirement is M > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BlackHole {
    mass: f64,
}

impl BlackHole {
    pub fn new(mass: f64) -> Result<Self> {
        if mass.is_finite() && mass > 0.0 {
            Ok(BlackHole { mass })
        } else {
            Err(Error::InvalidMass(mass))
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// T_H = 1 / (8πM).
    pub fn hawking_temperature(&self) -> f64 {
        1.0 / (EIGHT_PI * self.mass)
    }

    /// r = 2M.
    pub fn horizon_radius(&self) -> f64 {
        2.0 * self.mass
    }

    /// Bekenstein-Hawking entropy 4πM², zero at zero mass.
    pub fn entropy(&self) -> f64 {
        4.0 * PI * self.mass * self.mass
    }

    /// Total gravitational information M / T_H = 8πM².
    pub fn gravitational_information(&self) -> f64 {
        self.mass / self.hawking_temperature()
    }
}

impl TryFrom<f64> for BlackHole {
    type Error = Error;

    fn try_from(mass: f64) -> Result<Self> {
        BlackHole::new(mass)
    }
}

impl From<BlackHole> for f64 {
    fn from(bh: BlackHole) -> f64 {
        bh.mass
    }
}
