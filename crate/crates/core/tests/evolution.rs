use std::f64::consts::PI;

use ngsl::evolution::{
    analytic_lifetime, analytic_time_to_floor, cumulative_channel_budget, integrate,
    EvolutionConfig, StopReason, Trajectory, DEFAULT_ALPHA,
};
use ngsl::ledger::TransitEvent;
use ngsl::shell::{Shell, ShellPolicy};
use ngsl::BlackHole;

fn config(m0: f64, alpha: f64) -> EvolutionConfig {
    let mut cfg = EvolutionConfig::for_mass(m0);
    cfg.alpha = alpha;
    cfg.t_end = 1.1 * analytic_lifetime(m0, alpha);
    cfg
}

fn check_invariants(traj: &Trajectory) {
    for w in traj.samples.windows(2) {
        assert!(
            w[1].t > w[0].t,
            "time must increase: {} -> {}",
            w[0].t,
            w[1].t
        );
        if w[1].event_flag == 0 {
            assert!(
                w[1].mass <= w[0].mass,
                "mass rose without an event at t = {}",
                w[1].t
            );
        }
        assert!(w[1].mass > 0.0);
    }
    for s in &traj.samples {
        assert!((s.temperature * 8.0 * PI * s.mass - 1.0).abs() < 1e-14);
        assert!((s.information - 2.0 * s.entropy).abs() <= 1e-14 * s.information);
    }
}

#[test]
fn time_to_floor_matches_closed_form() {
    for alpha in [1.0, DEFAULT_ALPHA] {
        for m0 in [1.0, 2.0, 4.0] {
            let cfg = config(m0, alpha);
            let traj = integrate(&BlackHole::new(m0).unwrap(), &[], &cfg).unwrap();
            check_invariants(&traj);
            assert_eq!(traj.stop_reason, StopReason::MassFloor);
            let t = traj.time_to_floor().unwrap();
            let closed = analytic_time_to_floor(m0, cfg.mass_floor, alpha);
            assert!(
                ((t - closed) / closed).abs() <= 1e-6,
                "M0 = {m0}, alpha = {alpha}: {t} vs {closed}"
            );
        }
    }
}

#[test]
fn lifetime_scales_with_cube_of_mass() {
    let t = |m0: f64| {
        integrate(&BlackHole::new(m0).unwrap(), &[], &config(m0, 1.0))
            .unwrap()
            .time_to_floor()
            .unwrap()
    };
    let (t1, t2, t4) = (t(1.0), t(2.0), t(4.0));
    assert!((t2 / t1 - 8.0).abs() <= 8e-4);
    assert!((t4 / t2 - 8.0).abs() <= 8e-4);
}

#[test]
fn tighter_tolerance_does_not_hurt_accuracy() {
    let m0 = 1.0;
    let mut errors = Vec::new();
    for rel_tol in [1e-6, 1e-8, 1e-10, 1e-12] {
        let mut cfg = config(m0, 1.0);
        cfg.step_control.rel_tol = rel_tol;
        let traj = integrate(&BlackHole::new(m0).unwrap(), &[], &cfg).unwrap();
        // each sample's time against t(M) = (M0³ − M³)/(3α)
        let worst = traj
            .samples
            .iter()
            .skip(1)
            .map(|s| {
                let exact = (m0.powi(3) - s.mass.powi(3)) / 3.0;
                ((s.t - exact) / exact).abs()
            })
            .fold(0.0, f64::max);
        errors.push(worst);
    }
    for w in errors.windows(2) {
        assert!(w[1] <= w[0].max(1e-13) * 1.5, "errors {errors:?}");
    }
    assert!(errors[3] < 1e-10, "errors {errors:?}");
}

#[test]
fn single_infall_without_evaporation() {
    let mut cfg = EvolutionConfig::for_mass(1.0);
    cfg.alpha = 0.0;
    cfg.t_end = 2.0;
    let m_a = 0.001;
    let event = TransitEvent::infall(1.0, m_a).unwrap();
    let bh = BlackHole::new(1.0).unwrap();
    let traj = integrate(&bh, &[event], &cfg).unwrap();
    check_invariants(&traj);
    assert_eq!(traj.stop_reason, StopReason::ReachedEnd);
    assert_eq!(traj.final_sample().mass, 1.0 + m_a);
    assert_eq!(traj.events.len(), 1);

    let ms = cfg.shell_policy.shell_for(&bh).unwrap().mass;
    let expected = -8.0 * PI * ms * m_a;
    assert!((cumulative_channel_budget(&traj) - expected).abs() <= 1e-15 * expected.abs());
    assert_eq!(traj.budget_continuous, 0.0);

    let stepped = traj.samples.iter().position(|s| s.event_flag == 1).unwrap();
    assert_eq!(traj.samples[stepped].t, 1.0);
    assert!(traj.samples[..stepped].iter().all(|s| s.mass == 1.0));
}

#[test]
fn fixed_shell_budget_over_continuous_evaporation() {
    let ms = 0.02;
    let m0 = 1.0;
    let mut cfg = config(m0, 1.0);
    cfg.shell_policy = ShellPolicy::Fixed { mass: ms };
    let traj = integrate(&BlackHole::new(m0).unwrap(), &[], &cfg).unwrap();
    let floor = cfg.mass_floor;
    // −M_s·Δ(1/T_H) = −8π·M_s·(M_end − M_0)
    let expected = -8.0 * PI * ms * (floor - m0);
    assert!(
        ((traj.budget_continuous - expected) / expected).abs() < 1e-9,
        "{} vs {expected}",
        traj.budget_continuous
    );
    let shell = Shell::with_mass(&BlackHole::new(m0).unwrap(), ms).unwrap();
    assert_eq!(shell.mass, ms);
}

#[test]
fn emission_below_floor_stops_integration() {
    let mut cfg = EvolutionConfig::for_mass(1.0);
    cfg.alpha = 0.0;
    cfg.t_end = 1.0;
    cfg.mass_floor = 0.5;
    let events = [
        TransitEvent::emission(0.25, 0.25).unwrap(),
        TransitEvent::emission(0.5, 0.3).unwrap(),
    ];
    let traj = integrate(&BlackHole::new(1.0).unwrap(), &events, &cfg).unwrap();
    assert_eq!(traj.stop_reason, StopReason::EventBelowFloor);
    assert_eq!(traj.events.len(), 1);
    assert_eq!(traj.final_sample().mass, 0.75);
}

#[test]
fn events_between_steps_are_landed_exactly() {
    let cfg = config(1.0, 1.0);
    let times = [0.01, 0.1, 0.2, 0.3];
    let events: Vec<_> = times
        .iter()
        .map(|&t| TransitEvent::infall(t, 1e-4).unwrap())
        .collect();
    let traj = integrate(&BlackHole::new(1.0).unwrap(), &events, &cfg).unwrap();
    check_invariants(&traj);
    assert_eq!(traj.events.len(), times.len());
    for (r, &t) in traj.events.iter().zip(&times) {
        assert_eq!(traj.samples[r.sample_index].t, t);
    }
}
