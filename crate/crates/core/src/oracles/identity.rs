//! The partial-integration energy identity on a sweep of ball radii.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::potential::RadialPotential;
use crate::scattering::{energy_identity, solve_zero_energy, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub radius: f64,
    pub lhs: f64,
    /// `8πμ a (1 - a/R)²`
    pub rhs: f64,
    pub residual: f64,
    /// `8πμ a (1 - a/R)`
    pub flux: f64,
    pub flux_residual: f64,
    /// `rhs / (8πμa)`, zero when `a = 0`
    pub rhs_over_8pi_mu_a: f64,
}

/// Solves once, then evaluates both sides at every radius (each at least the
/// potential range).
pub fn energy_identity_sweep(
    pot: &RadialPotential,
    mu: f64,
    radii: &[f64],
) -> Result<Vec<IdentityRow>> {
    let pot = pot.finite_range(mu)?;
    if let Some(&r) = radii.iter().find(|&&r| !(r >= pot.range())) {
        return invalid(format!(
            "radius {r} lies inside the potential range {}",
            pot.range()
        ));
    }
    let sol = solve_zero_energy(&pot, mu, &GridSpec::default())?;
    radii
        .iter()
        .map(|&radius| {
            let id = energy_identity(&sol, radius)?;
            let scale = 8.0 * PI * mu * sol.a;
            Ok(IdentityRow {
                radius,
                lhs: id.lhs,
                rhs: id.rhs,
                residual: id.residual(),
                flux: id.flux,
                flux_residual: id.flux_residual(),
                rhs_over_8pi_mu_a: if sol.a == 0.0 { 0.0 } else { id.rhs / scale },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_core_rows() {
        let pot = RadialPotential::hard_core(1.0).unwrap();
        let rows = energy_identity_sweep(&pot, 0.5, &[1.0, 2.0, 4.0]).unwrap();
        for r in &rows {
            let x = 1.0 - 1.0 / r.radius;
            assert!((r.rhs_over_8pi_mu_a - x * x).abs() < 1e-9);
            assert!((r.flux / (4.0 * PI) - x).abs() < 1e-9);
            assert!(r.flux_residual < 1e-6);
        }
        // lhs tracks the flux, so the squared form is off by a/R
        assert!((rows[1].residual - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_radius_inside_range() {
        let pot = RadialPotential::square_well(2.0, 1.0).unwrap();
        assert!(energy_identity_sweep(&pot, 1.0, &[0.5]).is_err());
        assert!(energy_identity_sweep(&pot, 1.0, &[f64::NAN]).is_err());
    }

    #[test]
    fn zero_potential_rows_vanish() {
        let rows = energy_identity_sweep(&RadialPotential::zero(), 1.0, &[1.0, 3.0]).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.rhs_over_8pi_mu_a == 0.0 && r.lhs.abs() < 1e-12));
    }
}
