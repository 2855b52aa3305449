//! Natural-unit convention and SI conversion.
//!
//! Everything inside the crate is expressed in Planck units, G = c = ħ = k_B = 1.
//! SI values only appear when parsing scenario input or labelling output.

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Physical constants, CODATA 2018 recommended values.
pub mod constants {
    /// Newtonian constant of gravitation, m^3 kg^-1 s^-2 (CODATA 2018).
    pub const G: f64 = 6.674_30e-11;
    /// Speed of light in vacuum, m s^-1 (exact).
    pub const C: f64 = 299_792_458.0;
    /// Reduced Planck constant, J s (CODATA 2018, exact since the 2019 SI).
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Boltzmann constant, J K^-1 (exact since the 2019 SI).
    pub const K_B: f64 = 1.380_649e-23;
    /// Nominal solar mass parameter GM_sun, m^3 s^-2 (IAU 2015 Resolution B3).
    pub const GM_SUN: f64 = 1.327_124_4e20;
    /// Julian year, s.
    pub const JULIAN_YEAR: f64 = 365.25 * 86_400.0;

    pub fn planck_mass() -> f64 {
        (HBAR * C / G).sqrt()
    }

    pub fn planck_length() -> f64 {
        (HBAR * G / (C * C * C)).sqrt()
    }

    pub fn planck_time() -> f64 {
        (HBAR * G / C.powi(5)).sqrt()
    }

    pub fn planck_temperature() -> f64 {
        (HBAR * C.powi(5) / G).sqrt() / K_B
    }

    /// Solar mass in kg, derived from the IAU nominal GM_sun and CODATA G.
    pub fn solar_mass() -> f64 {
        GM_SUN / G
    }
}

/// Exponents of the base dimensions mass, length, time and temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Dimension {
    pub mass_exp: i8,
    pub length_exp: i8,
    pub time_exp: i8,
    pub temperature_exp: i8,
}

impl Dimension {
    pub const DIMENSIONLESS: Dimension = Dimension::new(0, 0, 0, 0);
    pub const MASS: Dimension = Dimension::new(1, 0, 0, 0);
    pub const LENGTH: Dimension = Dimension::new(0, 1, 0, 0);
    pub const TIME: Dimension = Dimension::new(0, 0, 1, 0);
    pub const TEMPERATURE: Dimension = Dimension::new(0, 0, 0, 1);
    pub const ENERGY: Dimension = Dimension::new(1, 2, -2, 0);

    pub const fn new(mass_exp: i8, length_exp: i8, time_exp: i8, temperature_exp: i8) -> Self {
        Dimension {
            mass_exp,
            length_exp,
            time_exp,
            temperature_exp,
        }
    }

    /// Size of one natural unit of this dimension, expressed in SI.
    pub fn planck_scale(self) -> f64 {
        constants::planck_mass().powi(self.mass_exp.into())
            * constants::planck_length().powi(self.length_exp.into())
            * constants::planck_time().powi(self.time_exp.into())
            * constants::planck_temperature().powi(self.temperature_exp.into())
    }
}

impl Add for Dimension {
    type Output = Dimension;

    fn add(self, rhs: Dimension) -> Dimension {
        Dimension::new(
            self.mass_exp + rhs.mass_exp,
            self.length_exp + rhs.length_exp,
            self.time_exp + rhs.time_exp,
            self.temperature_exp + rhs.temperature_exp,
        )
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "M^{} L^{} T^{} Θ^{}",
            self.mass_exp, self.length_exp, self.time_exp, self.temperature_exp
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitSystem {
    Natural,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub dimension: Dimension,
    pub system: UnitSystem,
}

impl Quantity {
    pub fn natural(value: f64, dimension: Dimension) -> Self {
        Quantity {
            value,
            dimension,
            system: UnitSystem::Natural,
        }
    }

    pub fn si(value: f64, dimension: Dimension) -> Self {
        Quantity {
            value,
            dimension,
            system: UnitSystem::Si,
        }
    }
}

/// Product of two quantities in the same unit system.
///
/// Mixed systems are first brought to SI.
impl Mul for Quantity {
    type Output = Quantity;

    fn mul(self, rhs: Quantity) -> Quantity {
        let dimension = self.dimension + rhs.dimension;
        match (self.system, rhs.system) {
            (UnitSystem::Natural, UnitSystem::Natural) => {
                Quantity::natural(self.value * rhs.value, dimension)
            }
            _ => Quantity::si(si_value(&self) * si_value(&rhs), dimension),
        }
    }
}

fn si_value(q: &Quantity) -> f64 {
    match q.system {
        UnitSystem::Si => q.value,
        UnitSystem::Natural => q.value * q.dimension.planck_scale(),
    }
}

/// Magnitude of `q` in Planck units.
pub fn to_natural(q: &Quantity) -> Result<f64> {
    if !q.value.is_finite() {
        return Err(Error::InvalidQuantity(format!(
            "non-finite value {}",
            q.value
        )));
    }
    Ok(match q.system {
        UnitSystem::Natural => q.value,
        UnitSystem::Si => q.value / q.dimension.planck_scale(),
    })
}

/// SI quantity whose natural-unit magnitude is `x`.
pub fn from_natural(x: f64, dimension: Dimension) -> Result<Quantity> {
    if !x.is_finite() {
        return Err(Error::InvalidQuantity(format!("non-finite value {x}")));
    }
    Ok(Quantity::si(x * dimension.planck_scale(), dimension))
}

/// A named unit accepted in scenario files.
#[derive(Debug, Clone, Copy)]
pub struct Unit {
    pub name: &'static str,
    pub dimension: Dimension,
    /// SI value of one of this unit; `None` for the natural unit of the dimension.
    pub si_factor: Option<f64>,
}

const UNIT_NAMES: &[(&str, Dimension)] = &[
    ("kg", Dimension::MASS),
    ("g", Dimension::MASS),
    ("solar_mass", Dimension::MASS),
    ("m", Dimension::LENGTH),
    ("km", Dimension::LENGTH),
    ("s", Dimension::TIME),
    ("yr", Dimension::TIME),
    ("K", Dimension::TEMPERATURE),
];

fn si_factor(name: &str) -> Option<f64> {
    Some(match name {
        "kg" | "m" | "s" | "K" => 1.0,
        "g" => 1e-3,
        "solar_mass" => constants::solar_mass(),
        "km" => 1e3,
        "yr" => constants::JULIAN_YEAR,
        _ => return None,
    })
}

pub fn lookup_unit(name: &str) -> Result<Unit> {
    UNIT_NAMES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|&(name, dimension)| Unit {
            name,
            dimension,
            si_factor: si_factor(name),
        })
        .ok_or_else(|| Error::UnknownUnit(name.to_string()))
}

/// Parse `"<number> [unit]"` into a natural-unit magnitude of dimension `expected`.
///
/// A bare number, or the unit `planck`/`natural`, is taken as already natural.
pub fn parse_quantity(text: &str, expected: Dimension) -> Result<f64> {
    let mut parts = text.split_whitespace();
    let number = parts
        .next()
        .ok_or_else(|| Error::InvalidQuantity("empty quantity".into()))?;
    let value: f64 = number
        .parse()
        .map_err(|_| Error::InvalidQuantity(format!("`{number}` is not a number")))?;
    let unit = parts.next();
    if let Some(extra) = parts.next() {
        return Err(Error::InvalidQuantity(format!(
            "unexpected trailing `{extra}`"
        )));
    }
    let q = match unit {
        None | Some("planck") | Some("natural") => Quantity::natural(value, expected),
        Some(name) => {
            let unit = lookup_unit(name)?;
            if unit.dimension != expected {
                return Err(Error::InvalidQuantity(format!(
                    "unit `{name}` has dimension {}, expected {expected}",
                    unit.dimension
                )));
            }
            Quantity::si(value * unit.si_factor.unwrap_or(1.0), expected)
        }
    };
    to_natural(&q)
}
