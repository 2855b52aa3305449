//! Holographic-screen temperature outside the horizon and the gravitational
//! information of a marked mass.
//!
//! The local acceleration is the proper acceleration of a static observer,
//! g = M / (r² √(1 − 2M/r)), and the redshift factor is the lapse √(1 − 2M/r).
//! Their product is horizon-regular: T = g·e^φ / 2π = M / (2π r²), which equals
//! the Hawking temperature at r = 2M.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{BlackHole, Error, Result};

/// Relative margin above 2M below which a radius counts as inside the horizon.
pub const HORIZON_MARGIN: f64 = 1e-12;

/// Where a marked object sits: strictly outside the horizon, or exactly on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Radius {
    Horizon,
    At(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenGeometry {
    pub r: f64,
    /// Static-observer proper acceleration.
    pub g: f64,
    /// e^φ.
    pub redshift: f64,
    pub temperature: f64,
}

pub fn screen_geometry(bh: &BlackHole, r: f64) -> Result<ScreenGeometry> {
    let horizon = bh.horizon_radius();
    if !(r > horizon * (1.0 + HORIZON_MARGIN)) || !r.is_finite() {
        return Err(Error::InsideHorizon { radius: r, horizon });
    }
    let m = bh.mass();
    // (r − 2M)/r keeps the lapse accurate next to the horizon
    let redshift = ((r - horizon) / r).sqrt();
    let g = m / (r * r * redshift);
    Ok(ScreenGeometry {
        r,
        g,
        redshift,
        temperature: g * redshift / (2.0 * PI),
    })
}

/// Screen temperature at `radius`; T_H on the horizon.
pub fn screen_temperature(bh: &BlackHole, radius: Radius) -> Result<f64> {
    match radius {
        Radius::Horizon => Ok(bh.hawking_temperature()),
        Radius::At(r) => screen_geometry(bh, r).map(|s| s.temperature),
    }
}

/// I = m / T_hs for a marked mass `m` at `radius`.
pub fn gravitational_information_marked(m: f64, bh: &BlackHole, radius: Radius) -> Result<f64> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidMass(m));
    }
    Ok(m / screen_temperature(bh, radius)?)
}

/// Entropy released when a marked mass moves from `from` to `to`: −ΔI.
///
/// Positive for inward motion.
pub fn entropy_from_descent(m: f64, bh: &BlackHole, from: Radius, to: Radius) -> Result<f64> {
    let before = gravitational_information_marked(m, bh, from)?;
    let after = gravitational_information_marked(m, bh, to)?;
    Ok(before - after)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bh(m: f64) -> BlackHole {
        BlackHole::new(m).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn near_horizon_temperature_is_hawking() {
        let hole = bh(1.0);
        let s = screen_geometry(&hole, 2.0 * (1.0 + 1e-10)).unwrap();
        assert!(rel(s.temperature, hole.hawking_temperature()) < 1e-9);
        assert!(s.redshift > 0.0 && s.redshift < 1.0);
    }

    #[test]
    fn temperature_at_four() {
        // 1/(32π)
        let s = screen_geometry(&bh(1.0), 4.0).unwrap();
        assert!(rel(s.temperature, 0.009_947_183_943_243_458) < 1e-14);
        assert_eq!(s.temperature, s.g * s.redshift / (2.0 * PI));
    }

    #[test]
    fn far_field_is_newtonian() {
        let r = 1e6;
        let s = screen_geometry(&bh(1.0), r).unwrap();
        assert!((1.0 - s.redshift).abs() < 2e-6);
        // lapse ≈ 1 − M/r, g ≈ M/r² (1 + M/r)
        let newtonian = 1.0 / (r * r) / (2.0 * PI);
        assert!(rel(s.temperature, newtonian) < 1e-12);
        assert!(rel(s.g, 1.0 / (r * r)) < 2e-6);
    }

    #[test]
    fn inside_horizon_rejected() {
        let hole = bh(1.0);
        for r in [1.0, 2.0, 2.0 * (1.0 + 1e-13), f64::NAN] {
            assert!(matches!(
                screen_geometry(&hole, r),
                Err(Error::InsideHorizon { .. })
            ));
        }
    }

    #[test]
    fn marked_information_values() {
        let hole = bh(1.0);
        let on_horizon = gravitational_information_marked(1.0, &hole, Radius::Horizon).unwrap();
        assert!(rel(on_horizon, 25.132_741_228_718_345) < 1e-15);
        let at_ten = gravitational_information_marked(0.001, &hole, Radius::At(10.0)).unwrap();
        assert!(rel(at_ten, 0.628_318_530_717_958_6) < 1e-13);
        assert!(matches!(
            gravitational_information_marked(0.0, &hole, Radius::At(10.0)),
            Err(Error::InvalidMass(_))
        ));
    }

    #[test]
    fn information_decreases_inward() {
        let hole = bh(1.0);
        let mut last = f64::INFINITY;
        for r in [100.0, 50.0, 10.0, 5.0, 3.0, 2.5, 2.1] {
            let i = gravitational_information_marked(0.5, &hole, Radius::At(r)).unwrap();
            assert!(i < last);
            last = i;
        }
        let h = gravitational_information_marked(0.5, &hole, Radius::Horizon).unwrap();
        assert!(h < last);
    }

    #[test]
    fn descent_values() {
        let hole = bh(1.0);
        let same = entropy_from_descent(1.0, &hole, Radius::At(4.0), Radius::At(4.0)).unwrap();
        assert_eq!(same, 0.0);
        let d = entropy_from_descent(1.0, &hole, Radius::At(4.0), Radius::At(3.0)).unwrap();
        assert!(rel(d, 14.0 * PI) < 1e-13);
        let back = entropy_from_descent(1.0, &hole, Radius::At(3.0), Radius::At(4.0)).unwrap();
        assert_eq!(back, -d);
    }

    #[test]
    fn horizon_information_matches_hole() {
        for m in [0.01, 1.0, 37.0, 1e4] {
            let hole = bh(m);
            let marked = gravitational_information_marked(m, &hole, Radius::Horizon).unwrap();
            assert!(rel(marked, hole.gravitational_information()) < 1e-12);
        }
    }
}
