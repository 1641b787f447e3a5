use std::f64::consts::PI;

use dilute_bose::lower_bound::{
    exponent_conditions, fit_rate, k_factor, lower_bound_thermo, optimize_parameters, SearchBudget,
    Strategy, ANSATZ_EXPONENTS,
};
use dilute_bose::upper_bounds::{
    dyson_hard_sphere, lhy_expansion, upper_bound_periodic, upper_bound_thermo,
};
use dilute_bose::{solve_zero_energy, FiniteBox, GridSpec, LowerBoundParams, RadialPotential};
use num_rational::Rational64;
use proptest::prelude::*;

#[test]
fn sandwich_for_a_soft_potential() {
    let pot = RadialPotential::square_well(4.0, 1.0).unwrap();
    let sol = solve_zero_energy(&pot, 0.5, &GridSpec::default()).unwrap();
    for y in [1e-12, 1e-9, 1e-7] {
        let opt = optimize_parameters(
            y,
            sol.a,
            pot.range(),
            Strategy::FreeSearch,
            &SearchBudget::default(),
        )
        .unwrap();
        let up = upper_bound_thermo(y);
        assert!(
            opt.ratio > 0.0 && opt.ratio < 1.0 && up.ratio > 1.0,
            "Y={y}: {} {}",
            opt.ratio,
            up.ratio
        );
    }
}

#[test]
fn soft_potentials_are_harder_to_bound() {
    // R0 > a shrinks the usable shell, so the best lower ratio cannot improve
    let y = 1e-12;
    let budget = SearchBudget::default();
    let hard = optimize_parameters(y, 1.0, 1.0, Strategy::PowerLaw, &budget).unwrap();
    let soft = optimize_parameters(y, 1.0, 3.0, Strategy::PowerLaw, &budget).unwrap();
    assert!(soft.ratio <= hard.ratio + 1e-12);
}

#[test]
fn free_search_never_loses_to_the_ansatz() {
    let budget = SearchBudget::default();
    for y in [1e-14, 1e-10, 1e-6] {
        let a = optimize_parameters(y, 1.0, 1.0, Strategy::PowerLaw, &budget).unwrap();
        let f = optimize_parameters(y, 1.0, 1.0, Strategy::FreeSearch, &budget).unwrap();
        assert!(f.ratio >= a.ratio, "Y={y}: {} < {}", f.ratio, a.ratio);
    }
}

#[test]
fn deficit_shrinks_deep_in_the_dilute_limit() {
    let budget = SearchBudget::default();
    let ys = [1e-60, 1e-90, 1e-120];
    let d: Vec<f64> = ys
        .iter()
        .map(|&y| {
            optimize_parameters(y, 1.0, 1.0, Strategy::PowerLaw, &budget)
                .unwrap()
                .deficit
        })
        .collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]));
    let fit = fit_rate(&ys, &d).unwrap();
    assert!((fit.slope - 1.0 / 17.0).abs() < 0.01, "{fit:?}");
}

#[test]
fn finite_box_upper_approaches_thermo() {
    let y = 1e-6;
    let a: f64 = 1.0;
    let rho = 3.0 * y / (4.0 * PI * a.powi(3));
    let mut prev = f64::INFINITY;
    for n in [10usize, 1000, 100_000] {
        let l = (n as f64 / rho).cbrt();
        let b = upper_bound_periodic(&FiniteBox::new(n, l).unwrap(), a, 1.0);
        let gap = (b.ratio - upper_bound_thermo(y).ratio).abs();
        assert!(gap < prev);
        prev = gap;
    }
    assert!(prev < 1e-6);
}

#[test]
fn lhy_sits_between_the_certified_bounds() {
    for y in [1e-12, 1e-9, 1e-6] {
        let lhy = lhy_expansion(y).ratio;
        let (dl, du) = dyson_hard_sphere(y);
        assert!(dl.ratio < lhy && lhy < upper_bound_thermo(y).ratio && lhy < du.ratio);
    }
}

#[test]
fn ansatz_error_exponents_in_rationals() {
    let r = |n, d| Rational64::new(n, d);
    let rep = exponent_conditions(r(1, 17), r(6, 17), r(3, 17));
    assert!(rep.all_pass());
    assert_eq!(
        rep.error_exponents,
        [r(1, 17), r(1, 17), r(2, 17), r(1, 17)]
    );
    assert_eq!(rep.boundary_exponent, r(1, 17));
}

proptest! {
    #[test]
    fn upper_ratio_grows_with_density(y1 in 1e-14..0.5f64, f in 1.0001..1.9f64) {
        let (lo, hi) = (upper_bound_thermo(y1).ratio, upper_bound_thermo(y1 * f).ratio);
        prop_assert!(lo > 1.0 && hi > lo);
    }

    #[test]
    fn k_factor_in_unit_interval(n in 2usize..200, ell in 5.0..500.0f64, eps in 1e-3..0.99f64, rf in 0.01..0.49f64) {
        let r = rf * ell;
        let k = k_factor(n, ell, eps, r, 0.5 * r.min(1.0), 0.5 * r.min(1.0));
        prop_assert!((0.0..1.0).contains(&k), "K = {}", k);
    }

    #[test]
    fn valid_lower_ratio_below_one(ly in -40.0..-2.0f64, c in prop::array::uniform3(0.05..5.0f64)) {
        let y = 10f64.powf(ly);
        let p = LowerBoundParams::from_ansatz(y, 1.0, 1.0, ANSATZ_EXPONENTS, c);
        let b = lower_bound_thermo(y, 1.0, &p);
        if b.valid {
            prop_assert!(b.ratio >= 0.0 && b.ratio < 1.0, "ratio {}", b.ratio);
        } else {
            prop_assert!(b.reason.is_some() && b.ratio.is_nan());
        }
    }
}
