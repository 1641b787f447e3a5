//! Temple's inequality on random finite matrices `H = H₀ + V`, `V ≥ 0`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::lower_bound::temple_bound;

use super::McConfig;

#[derive(Debug, Clone, Serialize)]
pub struct TempleReport {
    pub trials: usize,
    /// trials where `E₁⁽⁰⁾ ≤ ⟨H⟩₀`, so no bound is available
    pub skipped: usize,
    pub violations: usize,
    /// largest `bound - E₀` seen (negative when every bound holds)
    pub max_excess: f64,
}

impl TempleReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// `H₀` diagonal with random sorted levels, `V = B Bᵀ` scaled at random;
/// the trial state is the ground state of `H₀` and `E₁` is replaced by the
/// second level of `H₀`.
pub fn temple_toy_check(dim: usize, trials: usize, seed: u64) -> Result<TempleReport> {
    if !(2..=50).contains(&dim) {
        return invalid(format!("dimension must lie in 2..=50, got {dim}"));
    }
    let mut rng = McConfig {
        seed,
        ..McConfig::default()
    }
    .rng(0);
    let mut report = TempleReport {
        trials,
        skipped: 0,
        violations: 0,
        max_excess: f64::NEG_INFINITY,
    };
    for _ in 0..trials {
        let mut levels: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..10.0)).collect();
        levels.sort_by(f64::total_cmp);
        let scale = 10f64.powf(rng.gen_range(-3.0..0.5));
        let b = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
        let v = &b * b.transpose() * (scale / dim as f64);
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(levels.clone())) + &v;
        // ground state of H₀ is e₀
        let row = h.row(0);
        let mean = h[(0, 0)];
        let mean_sq = row.iter().map(|x| x * x).sum::<f64>();
        let bound = match temple_bound(mean, mean_sq, levels[1]) {
            Ok(b) => b,
            Err(_) => {
                report.skipped += 1;
                continue;
            }
        };
        let e0 = SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let excess = bound - e0;
        report.max_excess = report.max_excess.max(excess);
        if excess > 1e-10 * e0.abs().max(1.0) {
            report.violations += 1;
        }
    }
    Ok(report)
}

/// `H = diag(0, 1)` in the state `√(1-p)|0⟩ + √p|1⟩`: returns
/// `(bound, exact E₀ = 0)`. The bound is exact.
pub fn temple_two_level(p: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&p) {
        return invalid(format!("mixing must lie in [0, 1), got {p}"));
    }
    Ok((temple_bound(p, p, 1.0)?, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_toys_never_violate() {
        let r = temple_toy_check(10, 300, 7).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.skipped < r.trials);
    }

    #[test]
    fn zero_perturbation_is_exact() {
        // V = 0: the trial state is an eigenstate
        let levels = [0.7, 2.0, 5.0];
        assert_eq!(
            temple_bound(levels[0], levels[0] * levels[0], levels[1]).unwrap(),
            levels[0]
        );
        let r = temple_toy_check(3, 50, 3).unwrap();
        assert!(r.max_excess <= 1e-10);
    }

    #[test]
    fn two_level_is_tight() {
        let (b, e0) = temple_two_level(0.1).unwrap();
        assert!((b - e0).abs() < 1e-15);
        assert!(temple_two_level(1.5).is_err());
    }
}
