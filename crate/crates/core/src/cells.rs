//! Distribution of particles among Neumann cells.
//!
//! `c_n` is the fraction of cells holding exactly `n` particles, with
//! `Σ c_n = 1` and `Σ n c_n = k`. Cells with fewer than `p` particles cost
//! `n(n-1)`; fuller ones are split by superadditivity and cost `n(p-1)/2`.

use std::collections::BTreeMap;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

const CONSTRAINT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellDistribution {
    pub c: BTreeMap<usize, f64>,
    pub k: f64,
}

impl CellDistribution {
    /// Checks both constraints to `1e-12`.
    pub fn new(c: BTreeMap<usize, f64>, k: f64) -> Result<Self> {
        let d = Self { c, k };
        d.check()?;
        Ok(d)
    }

    /// Distribution with the mean implied by the weights.
    pub fn from_weights(weights: &[(usize, f64)]) -> Result<Self> {
        let mut c = BTreeMap::new();
        for &(n, w) in weights {
            *c.entry(n).or_insert(0.0) += w;
        }
        let k = c.iter().map(|(n, w)| *n as f64 * w).sum();
        Self::new(c, k)
    }

    pub fn check(&self) -> Result<()> {
        if self.c.values().any(|w| !(*w >= 0.0)) {
            return Err(Error::Constraint("negative weight".into()));
        }
        let total: f64 = self.c.values().sum();
        if (total - 1.0).abs() > CONSTRAINT_TOLERANCE {
            return Err(Error::Constraint(format!("weights sum to {total}, not 1")));
        }
        let mean: f64 = self.c.iter().map(|(n, w)| *n as f64 * w).sum();
        if (mean - self.k).abs() > CONSTRAINT_TOLERANCE * self.k.max(1.0) {
            return Err(Error::Constraint(format!(
                "mean occupation {mean} differs from k = {}",
                self.k
            )));
        }
        Ok(())
    }
}

/// Per-cell cost of `n` particles at threshold `p`.
pub fn cell_cost(n: usize, p: usize) -> f64 {
    let nf = n as f64;
    if n < p {
        nf * (nf - 1.0)
    } else {
        0.5 * nf * (p as f64 - 1.0)
    }
}

/// `Σ_{n<p} c_n n(n-1) + ½ Σ_{n≥p} c_n n(p-1)`.
pub fn cell_objective(dist: &CellDistribution, p: usize) -> Result<f64> {
    dist.check()?;
    Ok(dist.c.iter().map(|(n, w)| w * cell_cost(*n, p)).sum())
}

/// Minimizes `t(t-1) + ½(k-t)(p-1)` over `t ∈ [1, k]`; the unconstrained
/// minimizer is `t = (p+1)/4`.
pub fn closed_form_minimum(k: f64, p: usize) -> Result<(f64, f64)> {
    if !(k >= 1.0) || p < 1 {
        return invalid(format!("need k >= 1 and p >= 1, got k={k}, p={p}"));
    }
    let pf = p as f64;
    let t = ((pf + 1.0) / 4.0).clamp(1.0, k);
    Ok((t, t * (t - 1.0) + 0.5 * (k - t) * (pf - 1.0)))
}

/// Default cap on the occupation numbers in the linear program.
pub fn default_n_max(k: f64, p: usize) -> usize {
    ((8.0 * k).ceil() as usize).max(p)
}

/// Exact minimum of [`cell_objective`] over all distributions supported on
/// `0..=n_max`, by linear programming.
pub fn brute_force_distribution(k: f64, p: usize, n_max: usize) -> Result<f64> {
    if n_max < p {
        return invalid(format!("n_max = {n_max} must be at least p = {p}"));
    }
    if !(k >= 0.0) || k > n_max as f64 {
        return Err(Error::Infeasible(format!(
            "mean occupation {k} not reachable with n <= {n_max}"
        )));
    }
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = (0..=n_max)
        .map(|n| lp.add_var(cell_cost(n, p), (0.0, f64::INFINITY)))
        .collect();
    let ones: Vec<_> = vars.iter().map(|v| (*v, 1.0)).collect();
    let means: Vec<_> = vars
        .iter()
        .enumerate()
        .map(|(n, v)| (*v, n as f64))
        .collect();
    lp.add_constraint(&ones[..], ComparisonOp::Eq, 1.0);
    lp.add_constraint(&means[..], ComparisonOp::Eq, k);
    let sol = lp
        .solve()
        .map_err(|e| Error::Infeasible(format!("linear program: {e}")))?;
    Ok(sol.objective())
}

/// `(ρℓ³)⁻¹ inf Σ c_n E(n)` per particle, with `E(n) = per_cell_bound(n)`
/// below `p = ⌈4ρℓ³⌉` and `n E(p)/(2p)` from `p` on.
///
/// The infimum over distributions of mean `k` is the lower convex envelope
/// of the costs at `k`. The linear branch is unbounded, so mixing with it is
/// taken as the limit of ever fuller cells.
pub fn assemble_cell_bound(
    n: usize,
    l: f64,
    ell: f64,
    per_cell_bound: impl Fn(usize) -> f64,
) -> Result<f64> {
    if !(l > 0.0 && ell > 0.0) || l < ell {
        return invalid(format!("need L >= ell > 0, got L={l}, ell={ell}"));
    }
    let k = n as f64 / l.powi(3) * ell.powi(3);
    if !(k > 1.0) {
        return Err(Error::Constraint(format!("rho ell^3 = {k} <= 1")));
    }
    let p = (4.0 * k).ceil() as usize;
    let slope = per_cell_bound(p) / (2.0 * p as f64);
    let cost = |m: usize| {
        if m < p {
            per_cell_bound(m)
        } else {
            slope * m as f64
        }
    };
    let lo = k.floor() as usize;
    let mut best = f64::INFINITY;
    for i in 0..=lo.min(p) {
        let ei = cost(i);
        // ray limit
        best = best.min(ei + (k - i as f64) * slope);
        if i as f64 == k {
            best = best.min(ei);
        }
        for j in (lo + 1).max(i + 1)..=p {
            let w = (k - i as f64) / (j - i) as f64;
            best = best.min(ei + w * (cost(j) - ei));
        }
    }
    Ok(best / k)
}

/// Minimum over all distributions with at most two occupied values, which
/// is where a two-constraint linear program attains its optimum.
pub fn two_point_minimum(k: f64, p: usize, n_max: usize) -> Result<f64> {
    if !(k >= 0.0) || k > n_max as f64 {
        return Err(Error::Infeasible(format!(
            "mean occupation {k} not reachable with n <= {n_max}"
        )));
    }
    let mut best = f64::INFINITY;
    for i in 0..=n_max {
        for j in i..=n_max {
            let (fi, fj) = (i as f64, j as f64);
            if fi > k || fj < k {
                continue;
            }
            let v = if i == j {
                cell_cost(i, p)
            } else {
                let w = (fj - k) / (fj - fi);
                w * cell_cost(i, p) + (1.0 - w) * cell_cost(j, p)
            };
            best = best.min(v);
        }
    }
    Ok(best)
}
