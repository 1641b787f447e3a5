use std::f64::consts::PI;

use dilute_bose::lower_bound::{first_order_brackets, BoxGeometry, SoftPotential};
use dilute_bose::oracles::{
    dyson_equality_margin, energy_identity_sweep, mc_expectation_wr, run_suite, trial_energy_mc,
    wr_pair_mean, McConfig,
};
use dilute_bose::upper_bounds::upper_bound_finite_range;
use dilute_bose::{solve_zero_energy, FiniteBox, GridSpec, RadialPotential};

#[test]
fn dyson_margin_is_the_identity_gap() {
    // flux form minus squared form, divided by 8π
    let mu = 0.7;
    let pot = RadialPotential::square_well(6.0, 1.2).unwrap();
    let sol = solve_zero_energy(&pot, mu, &GridSpec::default()).unwrap();
    let radius = 2.4;
    let row = energy_identity_sweep(&pot, mu, &[radius]).unwrap()[0];
    let gap = (row.flux - row.rhs) / (8.0 * PI);
    let margin = dyson_equality_margin(&sol, radius, 1e-4).unwrap();
    assert!((margin / gap - 1.0).abs() < 1e-3, "{margin} vs {gap}");
}

#[test]
fn periodic_pair_mean_matches_mc() {
    let soft = SoftPotential::new(0.2, 1.5).unwrap();
    let cfg = McConfig {
        n_samples: 40_000,
        boundary: BoxGeometry::Periodic,
        ..McConfig::default()
    };
    let (w, _) = mc_expectation_wr(2, 6.0, &soft, &cfg).unwrap();
    let exact = wr_pair_mean(6.0, &soft, BoxGeometry::Periodic).unwrap() / 2.0;
    assert!(w.within(exact, 4.0), "{} ± {} vs {exact}", w.mean, w.sigma);
}

#[test]
fn overlapping_soft_range_stays_in_brackets() {
    // R beyond the half diagonal: the nearest neighbor is always in range
    let (n, ell, r, r0) = (6, 3.0, 1.4, 0.1);
    let soft = SoftPotential::new(r0, r).unwrap();
    let cfg = McConfig {
        n_samples: 20_000,
        ..McConfig::default()
    };
    let (w, _) = mc_expectation_wr(n, ell, &soft, &cfg).unwrap();
    let (lo, hi) = first_order_brackets(n, ell, r, r0).unwrap_or((0.0, f64::INFINITY));
    assert!(w.mean + 3.0 * w.sigma >= lo && w.mean - 3.0 * w.sigma <= hi);
}

#[test]
fn trial_energy_below_closed_form_for_soft_well() {
    let (mu, n, l) = (0.5, 4, 12.0);
    let pot = RadialPotential::square_well(4.0, 1.0).unwrap();
    let sol = solve_zero_energy(&pot, mu, &GridSpec::default()).unwrap();
    let bx = FiniteBox::new(n, l).unwrap();
    let cfg = McConfig {
        n_samples: 20_000,
        burn_in: 2000,
        boundary: BoxGeometry::Periodic,
        ..McConfig::default()
    };
    let est = trial_energy_mc(n, l, &pot, bx.b(), &sol, &cfg).unwrap();
    let closed = upper_bound_finite_range(&bx, sol.a, 1.0, mu)
        .energy_per_particle
        .unwrap()
        * n as f64;
    assert!(
        est.energy.mean <= closed + 3.0 * est.energy.sigma,
        "{} vs {closed}",
        est.energy.mean
    );
    assert!(est.tie_events == 0);
}

#[test]
fn suite_is_reproducible() {
    let a = serde_json::to_string(&run_suite(5).unwrap()).unwrap();
    let b = serde_json::to_string(&run_suite(5).unwrap()).unwrap();
    assert_eq!(a, b);
}
