use std::f64::consts::PI;

use proptest::prelude::*;

use ngsl::demon::{
    binary_entropy, coarsen_outcomes, column_marginal, evaluate, joint_distribution, mean_work,
    mutual_information, row_marginal, shannon_entropy, szilard_grid, verify_ngsl, FeedbackModel,
    Joint, Protocol,
};
use ngsl::ledger::{apply_event, Channel, LedgerMode, TransitEvent};
use ngsl::screen::{
    entropy_from_descent, gravitational_information_marked, screen_geometry, screen_temperature,
    Radius,
};
use ngsl::shell::{build_shell, DiskProfile};
use ngsl::units::{constants, from_natural, parse_quantity, to_natural, Dimension, Quantity};
use ngsl::BlackHole;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..hi.log10()).prop_map(|e| 10f64.powf(e))
}

// products of two of these keep every Planck scale within normal f64 range
fn dimension() -> impl Strategy<Value = Dimension> {
    (-1i8..=1, -1i8..=1, -1i8..=1, -1i8..=1).prop_map(|(m, l, t, k)| Dimension::new(m, l, t, k))
}

proptest! {
    #[test]
    fn conversion_is_multiplicative(
        a in log_uniform(1e-20, 1e20),
        b in log_uniform(1e-20, 1e20),
        da in dimension(),
        db in dimension(),
    ) {
        let qa = Quantity::si(a, da);
        let qb = Quantity::si(b, db);
        let product = to_natural(&(qa * qb)).unwrap();
        let separate = to_natural(&qa).unwrap() * to_natural(&qb).unwrap();
        prop_assert!(close(product, separate, 1e-12));
    }

    #[test]
    fn conversion_round_trips(x in log_uniform(1e-30, 1e30), d in dimension()) {
        let back = to_natural(&from_natural(x, d).unwrap()).unwrap();
        prop_assert!(close(back, x, 1e-14));
    }

    #[test]
    fn thermodynamic_relations(m in log_uniform(1e-3, 1e6)) {
        let bh = BlackHole::new(m).unwrap();
        prop_assert!(close(bh.hawking_temperature() * 8.0 * PI * m, 1.0, 1e-15));
        prop_assert!(close(bh.entropy(), PI * bh.horizon_radius().powi(2), 1e-15));
        prop_assert!(close(bh.gravitational_information() * bh.hawking_temperature(), m, 1e-15));
        // dS/dM = 1/T_H
        let h = m * 1e-6;
        let slope = (BlackHole::new(m + h).unwrap().entropy()
            - BlackHole::new(m - h).unwrap().entropy()) / (2.0 * h);
        prop_assert!(close(slope, 1.0 / bh.hawking_temperature(), 1e-8));
    }

    #[test]
    fn screen_temperature_matches_newtonian_form(m in log_uniform(1e-2, 1e4), x in 1.001f64..1e3) {
        let bh = BlackHole::new(m).unwrap();
        let r = 2.0 * m * x;
        let t = screen_temperature(&bh, Radius::At(r)).unwrap();
        prop_assert!(close(t, m / (2.0 * PI * r * r), 1e-12));
        prop_assert!(t < bh.hawking_temperature());
        let g = screen_geometry(&bh, r).unwrap();
        prop_assert!(close(g.g * g.redshift, m / (r * r), 1e-12));
    }

    #[test]
    fn descent_releases_entropy(m in log_uniform(1e-2, 1e4), a in 1.01f64..100.0, b in 1.01f64..100.0) {
        let bh = BlackHole::new(m).unwrap();
        let (outer, inner) = if a > b { (a, b) } else { (b, a) };
        prop_assume!(outer / inner > 1.0 + 1e-9);
        let mass = 1e-3 * m;
        let released = entropy_from_descent(
            mass, &bh, Radius::At(2.0 * m * outer), Radius::At(2.0 * m * inner),
        ).unwrap();
        prop_assert!(released > 0.0);
        let to_horizon = entropy_from_descent(mass, &bh, Radius::At(2.0 * m * outer), Radius::Horizon).unwrap();
        let expected = gravitational_information_marked(mass, &bh, Radius::At(2.0 * m * outer)).unwrap()
            - 8.0 * PI * m * mass;
        prop_assert!(close(to_horizon, expected, 1e-12));
    }

    #[test]
    fn ledger_entry_invariants(m in log_uniform(1e-2, 1e4), k in 2.0f64..6.0, infall in any::<bool>()) {
        let bh = BlackHole::new(m).unwrap();
        let dm = m * 10f64.powf(-k);
        let event = if infall {
            TransitEvent::infall(0.0, dm).unwrap()
        } else {
            TransitEvent::emission(0.0, dm).unwrap()
        };
        let (after_d, d) = apply_event(&bh, &event, LedgerMode::Differential, 0.0).unwrap();
        let (after_e, e) = apply_event(&bh, &event, LedgerMode::Exact, 0.0).unwrap();
        prop_assert_eq!(after_d, after_e);
        prop_assert_eq!(d.ds_bh.signum(), event.mass_change().signum());
        let exact_change = after_e.entropy() - bh.entropy();
        prop_assert!(close(e.ds_bh, exact_change, 1e-9));
        prop_assert!(close(e.ds_bh - d.ds_bh, 4.0 * PI * dm * dm, 1e-6));
        for c in [Channel::Sense, Channel::Carry] {
            prop_assert_eq!(d.ngsl_balance(c), 0.0);
            prop_assert!(e.ngsl_balance(c) >= 0.0);
        }
    }

    #[test]
    fn shell_mass_matches_quadrature(
        m in log_uniform(0.1, 10.0),
        p in prop::sample::select(vec![0.0, 1.0, 2.0, 3.0]),
        window in 0.05f64..20.0,
    ) {
        let profile = DiskProfile::new(2.5e-3, 1.5, p, 200.0).unwrap();
        let bh = BlackHole::new(m).unwrap();
        let shell = build_shell(&bh, &profile, window).unwrap();
        let quad = simpson_annulus(&profile, shell.r_inner, shell.r_outer);
        prop_assert!(close(shell.mass, quad, 1e-10), "{} vs {}", shell.mass, quad);
    }
}

/// Composite Simpson in u = ln r of Σ(r)·2πr², 4000 panels.
fn simpson_annulus(profile: &DiskProfile, a: f64, b: f64) -> f64 {
    let n = 4000;
    let (ua, ub) = (a.ln(), b.ln());
    let h = (ub - ua) / n as f64;
    let f = |u: f64| {
        let r = u.exp();
        profile.surface_density(r) * 2.0 * PI * r * r
    };
    let mut sum = f(ua) + f(ub);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(ua + i as f64 * h);
    }
    sum * h / 3.0
}

fn joint_strategy() -> impl Strategy<Value = Joint> {
    (2usize..=4, 2usize..=4).prop_flat_map(|(nx, ny)| {
        prop::collection::vec(prop::collection::vec(0.0f64..1.0, ny), nx).prop_map(|rows| {
            let total: f64 = rows.iter().flatten().sum::<f64>().max(1e-300);
            rows.into_iter()
                .map(|r| r.into_iter().map(|v| v / total).collect())
                .collect()
        })
    })
}

fn distribution(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

proptest! {
    #[test]
    fn mutual_information_bounds(joint in joint_strategy()) {
        prop_assume!(joint.iter().flatten().sum::<f64>() > 0.5);
        let mi = mutual_information(&joint).unwrap();
        prop_assert!(mi >= 0.0);
        let hx = shannon_entropy(&row_marginal(&joint));
        let hy = shannon_entropy(&column_marginal(&joint));
        prop_assert!(mi <= hx.min(hy) + 1e-12);
    }

    #[test]
    fn product_distributions_carry_no_information(px in distribution(3), py in distribution(4)) {
        let joint: Joint = px.iter().map(|a| py.iter().map(|b| a * b).collect()).collect();
        prop_assert!(mutual_information(&joint).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn coarsening_never_adds_information(joint in joint_strategy(), seed in any::<u64>()) {
        prop_assume!(joint.iter().flatten().sum::<f64>() > 0.5);
        let ny = joint[0].len();
        let groups: Vec<usize> = (0..ny).map(|y| ((seed >> (2 * y)) as usize) % (ny - 1)).collect();
        let mut used: Vec<usize> = groups.clone();
        used.sort_unstable();
        used.dedup();
        let relabel: Vec<usize> = groups.iter().map(|g| used.binary_search(g).unwrap()).collect();
        let coarse = coarsen_outcomes(&joint, &relabel);
        let fine = mutual_information(&joint).unwrap();
        prop_assert!(mutual_information(&coarse).unwrap() <= fine + 1e-12);
    }

    #[test]
    fn models_obey_information_bounds(n in 2usize..=8, eps in 0.0f64..=0.5, t in log_uniform(0.01, 100.0), seed in any::<u64>()) {
        let prior: Vec<f64> = (0..n).map(|i| 1.0 + ((seed >> (i * 7)) % 13) as f64).collect();
        let s: f64 = prior.iter().sum();
        let prior: Vec<f64> = prior.into_iter().map(|x| x / s).collect();
        let model = FeedbackModel::new(prior.clone(), eps, t, &Protocol::Optimal).unwrap();
        let joint = joint_distribution(&model);
        let mi = mutual_information(&joint).unwrap();
        prop_assert!(mi <= shannon_entropy(&prior).min(shannon_entropy(&column_marginal(&joint))) + 1e-12);
        let e = evaluate(&model).unwrap();
        prop_assert!(e.margin.abs() <= 1e-12 * mi.max(1.0));
        for confidence in [0.5, 0.7, 0.9, 0.99] {
            let other = FeedbackModel::new(prior.clone(), eps, t, &Protocol::Assumed { confidence }).unwrap();
            prop_assert!(mean_work(&other) <= t * mi + 1e-12 * t);
        }
    }
}

#[test]
fn szilard_work_never_exceeds_information() {
    for protocol in [Protocol::Optimal, Protocol::Idle] {
        for model in szilard_grid(50, 2.0, &protocol).unwrap() {
            let mi = mutual_information(&joint_distribution(&model)).unwrap();
            assert!(mean_work(&model) <= 2.0 * mi + 1e-12);
        }
    }
    let report = verify_ngsl(&szilard_grid(50, 1.0, &Protocol::Optimal).unwrap(), 1e-12).unwrap();
    assert!(report.pass);
    assert_eq!(report.saturated.len(), report.evaluations.len());
}

#[test]
fn szilard_information_closed_form() {
    for i in 0..=50 {
        let eps = i as f64 / 100.0;
        let model = FeedbackModel::szilard(eps, 1.0, &Protocol::Optimal).unwrap();
        let mi = mutual_information(&joint_distribution(&model)).unwrap();
        assert!((mi - (std::f64::consts::LN_2 - binary_entropy(eps))).abs() < 1e-14);
    }
}

#[test]
fn solar_mass_parses_to_natural_units() {
    let m = parse_quantity("1.0 solar_mass", Dimension::MASS).unwrap();
    let expected = constants::solar_mass() / constants::planck_mass();
    assert!(close(m, expected, 1e-15));
    assert!(close(m, 9.136e37, 1e-3));
}
