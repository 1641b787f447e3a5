//! A quick battery of independent checks, run by `verify`.

use serde::Serialize;

use crate::cells::{
    brute_force_distribution, closed_form_minimum, default_n_max, two_point_minimum,
};
use crate::error::Result;
use crate::lower_bound::{exponent_conditions, BoxGeometry, SoftPotential};
use crate::potential::RadialPotential;
use crate::scattering::{solve_zero_energy, GridSpec};

use super::{
    energy_identity_sweep, mc_expectation_wr, random_dyson_suite, temple_toy_check, wr_pair_mean,
    McConfig,
};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed,
        detail,
    }
}

pub fn run_suite(seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let grid = GridSpec::default();

    let sol = solve_zero_energy(&RadialPotential::hard_core(1.0)?, 1.0, &grid)?;
    checks.push(check(
        "hard-core scattering length",
        (sol.a - 1.0).abs() < 1e-9,
        format!("a = {:.12}", sol.a),
    ));

    let (v0, r0, mu) = (3.0_f64, 1.0_f64, 0.5_f64);
    let kappa = (v0 / (2.0 * mu)).sqrt();
    let exact = r0 * (1.0 - (kappa * r0).tanh() / (kappa * r0));
    let well = solve_zero_energy(&RadialPotential::square_well(v0, r0)?, mu, &grid)?;
    checks.push(check(
        "square-well scattering length",
        (well.a / exact - 1.0).abs() < 1e-6,
        format!("a = {:.10}, closed form {:.10}", well.a, exact),
    ));

    let rows = energy_identity_sweep(&RadialPotential::square_well(v0, r0)?, mu, &[1.0, 2.0, 5.0])?;
    let worst = rows.iter().map(|r| r.flux_residual).fold(0.0, f64::max);
    checks.push(check(
        "energy identity (flux form)",
        worst < 1e-6,
        format!("max relative residual {worst:.2e}"),
    ));

    let cfg = McConfig {
        seed,
        ..McConfig::default()
    };
    let dyson = random_dyson_suite(200, &cfg, 1e-9)?;
    checks.push(check(
        "radial interaction inequality",
        dyson.violations == 0,
        format!(
            "{} trials, min margin {:.3e}",
            dyson.trials, dyson.min_margin
        ),
    ));

    let temple = temple_toy_check(12, 200, seed)?;
    checks.push(check(
        "temple inequality on matrices",
        temple.passed(),
        format!(
            "{} trials, {} skipped, max excess {:.3e}",
            temple.trials, temple.skipped, temple.max_excess
        ),
    ));

    let soft = SoftPotential::new(0.5, 3.0)?;
    let mc = McConfig {
        seed,
        n_samples: 20_000,
        ..McConfig::default()
    };
    let (w, _) = mc_expectation_wr(2, 10.0, &soft, &mc)?;
    let w_exact = wr_pair_mean(10.0, &soft, BoxGeometry::Free)? / 2.0;
    checks.push(check(
        "two-particle W_R expectation",
        w.within(w_exact, 4.0),
        format!("{:.6e} ± {:.1e}, exact {:.6e}", w.mean, w.sigma, w_exact),
    ));

    let mut worst = 0.0_f64;
    for (k, p) in [(1.5, 4), (3.0, 12), (7.25, 29), (2.0, 50)] {
        let (_, closed) = closed_form_minimum(k, p)?;
        let lp = brute_force_distribution(k, p, default_n_max(k, p))?;
        let vertex = two_point_minimum(k, p, default_n_max(k, p))?;
        worst = worst.max((lp - vertex).abs()).max(closed - lp);
    }
    checks.push(check(
        "cell distribution minimum",
        worst < 1e-9,
        format!("max gap {worst:.2e}"),
    ));

    let rep = exponent_conditions(1.0 / 17.0, 6.0 / 17.0, 3.0 / 17.0);
    checks.push(check(
        "ansatz exponent conditions",
        rep.all_pass(),
        format!("error exponents {:?}", rep.error_exponents),
    ));

    let all_passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport { checks, all_passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let r = run_suite(1).unwrap();
        for c in &r.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert!(r.all_passed);
    }
}
