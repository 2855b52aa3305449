//! Two-channel information ledger for horizon transits.
//!
//! When a particle of mass `m` crosses the horizon, the hole's information
//! M/T_H changes by two equal first-order terms: the singularity sensing the
//! change of T_H (`M·Δ(1/T_H)`) and the information carried by the particle
//! (`dM/T_H`). The hole's entropy changes by the same amount, so the balance
//! `dS − dI` vanishes for whichever channel an observer reads. Reading one
//! channel makes the other unavailable.

use serde::{Deserialize, Serialize};

use crate::{BlackHole, Error, Result, EIGHT_PI};

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Infall,
    Emission,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitEvent {
    pub time: f64,
    pub particle_mass: f64,
    pub direction: Direction,
}

impl TransitEvent {
    pub fn new(time: f64, particle_mass: f64, direction: Direction) -> Result<Self> {
        if !(particle_mass.is_finite() && particle_mass > 0.0) {
            return Err(Error::InvalidMass(particle_mass));
        }
        if !time.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "event time {time} is not finite"
            )));
        }
        Ok(TransitEvent {
            time,
            particle_mass,
            direction,
        })
    }

    pub fn infall(time: f64, particle_mass: f64) -> Result<Self> {
        Self::new(time, particle_mass, Direction::Infall)
    }

    pub fn emission(time: f64, particle_mass: f64) -> Result<Self> {
        Self::new(time, particle_mass, Direction::Emission)
    }

    /// Signed mass change of the hole.
    pub fn mass_change(&self) -> f64 {
        match self.direction {
            Direction::Infall => self.particle_mass,
            Direction::Emission => -self.particle_mass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LedgerMode {
    /// First-order terms evaluated at the pre-event mass.
    #[default]
    Differential,
    /// Exact entropy difference of the end states.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    /// M·Δ(1/T_H): the singularity sensing the temperature change.
    Sense,
    /// dM/T_H: the information carried across by the particle.
    Carry,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Sense => "sense",
            Channel::Carry => "carry",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelState {
    #[default]
    Unread,
    SenseRead,
    CarryRead,
}

/// 8π·M·dM, the shared shape of every first-order ledger term.
#[inline]
pub(crate) fn first_order(mass: f64, dm: f64) -> f64 {
    EIGHT_PI * mass * dm
}

/// M·Δ(1/T_H) with Δ(1/T_H) = 8π·dM.
pub fn info_sense_term(bh: &BlackHole, dm: f64) -> f64 {
    first_order(bh.mass(), dm)
}

/// dM / T_H at the pre-event mass.
pub fn info_carry_term(bh: &BlackHole, dm: f64) -> f64 {
    first_order(bh.mass(), dm)
}

/// Second-order gap 4π·dM² between the exact and first-order entropy change.
pub fn discretization_residual(dm: f64) -> f64 {
    4.0 * PI * dm * dm
}

pub fn bh_entropy_change(bh: &BlackHole, dm: f64, mode: LedgerMode) -> Result<f64> {
    match mode {
        LedgerMode::Differential => Ok(first_order(bh.mass(), dm)),
        LedgerMode::Exact => {
            let remaining = bh.mass() + dm;
            if !(remaining > 0.0) {
                return Err(Error::EvaporatedPastZero { remaining });
            }
            Ok(first_order(bh.mass(), dm) + discretization_residual(dm))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub pre_mass: f64,
    pub dm: f64,
    di_sense: f64,
    di_carry: f64,
    pub ds_bh: f64,
    pub mode: LedgerMode,
    /// 4π·dM² in exact mode, zero in differential mode.
    pub discretization_residual: f64,
    channel_state: ChannelState,
}

impl LedgerEntry {
    pub fn channel_state(&self) -> ChannelState {
        self.channel_state
    }

    /// Read one information channel.
    ///
    /// The first read fixes the channel; repeating it is allowed, reading the
    /// other one is a complementarity violation.
    pub fn observe(&mut self, channel: Channel) -> Result<f64> {
        let allowed = match (self.channel_state, channel) {
            (ChannelState::Unread, Channel::Sense) | (ChannelState::SenseRead, Channel::Sense) => {
                self.channel_state = ChannelState::SenseRead;
                true
            }
            (ChannelState::Unread, Channel::Carry) | (ChannelState::CarryRead, Channel::Carry) => {
                self.channel_state = ChannelState::CarryRead;
                true
            }
            _ => false,
        };
        if !allowed {
            let read = match self.channel_state {
                ChannelState::SenseRead => Channel::Sense,
                _ => Channel::Carry,
            };
            return Err(Error::ComplementarityViolation {
                read: read.name(),
                requested: channel.name(),
            });
        }
        Ok(self.term(channel))
    }

    /// dS − dI for the chosen channel. Reads the ledger's own books; it does not
    /// count as an observation.
    ///
    /// In exact mode the first-order part cancels identically and the second-order
    /// part is added back, so the result is 4π·dM² without cancellation error.
    pub fn ngsl_balance(&self, channel: Channel) -> f64 {
        let di = self.term(channel);
        match self.mode {
            LedgerMode::Differential => self.ds_bh - di,
            LedgerMode::Exact => {
                (first_order(self.pre_mass, self.dm) - di) + self.discretization_residual
            }
        }
    }

    fn term(&self, channel: Channel) -> f64 {
        match channel {
            Channel::Sense => self.di_sense,
            Channel::Carry => self.di_carry,
        }
    }

    /// Both information terms, bypassing the channel state. For bookkeeping
    /// and serialization only; observers go through [`LedgerEntry::observe`].
    pub fn audit_terms(&self) -> (f64, f64) {
        (self.di_sense, self.di_carry)
    }
}

/// Apply one transit to `bh`.
///
/// All first-order terms use the pre-event mass. Emission that would leave the
/// hole below `mass_floor` is rejected.
pub fn apply_event(
    bh: &BlackHole,
    event: &TransitEvent,
    mode: LedgerMode,
    mass_floor: f64,
) -> Result<(BlackHole, LedgerEntry)> {
    let dm = event.mass_change();
    let remaining = bh.mass() + dm;
    if event.direction == Direction::Emission && remaining < mass_floor {
        return Err(Error::EvaporatedPastFloor {
            remaining,
            floor: mass_floor,
        });
    }
    let ds_bh = bh_entropy_change(bh, dm, mode)?;
    let entry = LedgerEntry {
        pre_mass: bh.mass(),
        dm,
        di_sense: info_sense_term(bh, dm),
        di_carry: info_carry_term(bh, dm),
        ds_bh,
        mode,
        discretization_residual: match mode {
            LedgerMode::Differential => 0.0,
            LedgerMode::Exact => discretization_residual(dm),
        },
        channel_state: ChannelState::Unread,
    };
    Ok((BlackHole::new(remaining)?, entry))
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

    // 8π·0.001, mpmath
    const EIGHT_PI_MILLI: f64 = 0.025_132_741_228_718_346;

    #[test]
    fn sense_term() {
        assert!(rel(info_sense_term(&bh(1.0), 0.001), EIGHT_PI_MILLI) < 1e-15);
        assert_eq!(info_sense_term(&bh(1.0), 0.0), 0.0);
        assert_eq!(
            info_sense_term(&bh(1.0), -0.001),
            -info_sense_term(&bh(1.0), 0.001)
        );
    }

    #[test]
    fn carry_term() {
        assert_eq!(
            info_carry_term(&bh(1.0), 0.001),
            info_sense_term(&bh(1.0), 0.001)
        );
        assert!(rel(info_carry_term(&bh(5.0), 0.01), 1.256_637_061_435_917_3) < 1e-15);
        assert_eq!(info_carry_term(&bh(5.0), 0.0), 0.0);
    }

    #[test]
    fn entropy_change_modes() {
        let hole = bh(1.0);
        let d = bh_entropy_change(&hole, 0.001, LedgerMode::Differential).unwrap();
        assert!(rel(d, EIGHT_PI_MILLI) < 1e-15);
        let e = bh_entropy_change(&hole, 0.001, LedgerMode::Exact).unwrap();
        let oracle = bh(1.001).entropy() - hole.entropy();
        assert!(rel(e, oracle) < 1e-12);
        assert!(rel(e, 0.025_145_307_599_332_705) < 1e-14);
        assert_eq!(
            bh_entropy_change(&hole, 0.0, LedgerMode::Exact).unwrap(),
            0.0
        );
        assert_eq!(
            bh_entropy_change(&hole, 0.0, LedgerMode::Differential).unwrap(),
            0.0
        );
        assert!(matches!(
            bh_entropy_change(&hole, -1.5, LedgerMode::Exact),
            Err(Error::EvaporatedPastZero { .. })
        ));
    }

    #[test]
    fn apply_infall_and_emission() {
        let hole = bh(1.0);
        let (after, entry) = apply_event(
            &hole,
            &TransitEvent::infall(0.0, 0.001).unwrap(),
            LedgerMode::Differential,
            1e-6,
        )
        .unwrap();
        assert_eq!(after.mass(), 1.001);
        let (s, c) = entry.audit_terms();
        assert!(rel(s, EIGHT_PI_MILLI) < 1e-15);
        assert_eq!(s, c);
        assert_eq!(s, entry.ds_bh);
        assert_eq!(entry.channel_state(), ChannelState::Unread);

        let (out, e2) = apply_event(
            &hole,
            &TransitEvent::emission(0.0, 0.001).unwrap(),
            LedgerMode::Differential,
            1e-6,
        )
        .unwrap();
        assert_eq!(out.mass(), 0.999);
        assert_eq!(e2.ds_bh, -entry.ds_bh);

        let (back, _) = apply_event(
            &after,
            &TransitEvent::emission(1.0, 0.001).unwrap(),
            LedgerMode::Differential,
            1e-6,
        )
        .unwrap();
        // 1.001 − 0.001 rounds to 1 − 2⁻⁵³
        assert!((back.mass() - 1.0).abs() <= f64::EPSILON);
    }

    #[test]
    fn infall_then_emission_is_exact_for_representable_masses() {
        let floor = 1e-6;
        for (m, dm) in [(1.0, 0.0009765625), (3.5, 0.25), (1024.0, 0.125)] {
            let start = bh(m);
            let (up, _) = apply_event(
                &start,
                &TransitEvent::infall(0.0, dm).unwrap(),
                LedgerMode::Exact,
                floor,
            )
            .unwrap();
            let (down, _) = apply_event(
                &up,
                &TransitEvent::emission(0.0, dm).unwrap(),
                LedgerMode::Exact,
                floor,
            )
            .unwrap();
            assert_eq!(down, start);
        }
    }

    #[test]
    fn emission_below_floor() {
        let r = apply_event(
            &bh(1.0),
            &TransitEvent::emission(0.0, 0.9995).unwrap(),
            LedgerMode::Differential,
            1e-3,
        );
        assert!(matches!(r, Err(Error::EvaporatedPastFloor { .. })));
    }

    #[test]
    fn invalid_event() {
        assert!(matches!(
            TransitEvent::infall(0.0, -1.0),
            Err(Error::InvalidMass(_))
        ));
        assert!(TransitEvent::infall(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn balances() {
        for mode in [LedgerMode::Differential, LedgerMode::Exact] {
            let (_, entry) = apply_event(
                &bh(1.0),
                &TransitEvent::infall(0.0, 0.001).unwrap(),
                mode,
                1e-6,
            )
            .unwrap();
            for ch in [Channel::Sense, Channel::Carry] {
                let b = entry.ngsl_balance(ch);
                match mode {
                    LedgerMode::Differential => assert_eq!(b, 0.0),
                    LedgerMode::Exact => assert!(rel(b, 4.0 * PI * 1e-6) < 1e-12),
                }
            }
        }
    }

    #[test]
    fn observation_state_machine() {
        let (_, mut entry) = apply_event(
            &bh(1.0),
            &TransitEvent::infall(0.0, 0.001).unwrap(),
            LedgerMode::Differential,
            1e-6,
        )
        .unwrap();
        let v = entry.observe(Channel::Sense).unwrap();
        assert_eq!(entry.channel_state(), ChannelState::SenseRead);
        assert_eq!(entry.observe(Channel::Sense).unwrap(), v);
        let err = entry.observe(Channel::Carry).unwrap_err();
        assert_eq!(
            err,
            Error::ComplementarityViolation {
                read: "sense",
                requested: "carry"
            }
        );
        assert_eq!(entry.channel_state(), ChannelState::SenseRead);
    }
}
