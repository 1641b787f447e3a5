//! Radial form of Dyson's lemma:
//! `∫_0^{R1} {μ[u' - u/r]² + ½ v u²} dr ≥ μa ∫_0^{R1} U u² dr`.

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::lower_bound::SoftPotential;
use crate::potential::RadialPotential;
use crate::quadrature::gauss5;
use crate::scattering::{solve_zero_energy, GridSpec, ScatteringSolution};

use super::McConfig;

/// Radial trial function `u(r)`, `u(0) = 0`.
#[derive(Debug, Clone)]
pub enum TrialProfile {
    /// Linear interpolation between `(r, u)` nodes starting at `(0, 0)`.
    PiecewiseLinear(Vec<(f64, f64)>),
    Scattering(Box<ScatteringSolution>),
}

impl TrialProfile {
    fn check(&self, r1: f64) -> Result<()> {
        if let TrialProfile::PiecewiseLinear(nodes) = self {
            if nodes.len() < 2 || nodes[0] != (0.0, 0.0) {
                return invalid("piecewise-linear profile must start at (0, 0) and have two nodes");
            }
            if nodes.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                return invalid("profile nodes must be strictly increasing in r");
            }
            if nodes.iter().any(|(r, u)| !r.is_finite() || !u.is_finite()) {
                return invalid("profile contains non-finite values");
            }
            if nodes.last().unwrap().0 < r1 {
                return invalid(format!("profile ends before R1 = {r1}"));
            }
        }
        Ok(())
    }

    /// `(α, β)` with `u = α + βr` on the linear piece containing `[lo, hi]`.
    fn linear_piece(nodes: &[(f64, f64)], lo: f64, hi: f64) -> (f64, f64) {
        let mid = 0.5 * (lo + hi);
        let i = nodes
            .partition_point(|n| n.0 <= mid)
            .clamp(1, nodes.len() - 1)
            - 1;
        let ((r0, u0), (r1, u1)) = (nodes[i], nodes[i + 1]);
        let beta = (u1 - u0) / (r1 - r0);
        (u0 - beta * r0, beta)
    }
}

fn integrate(
    pot: &RadialPotential,
    soft: &SoftPotential,
    mu: f64,
    a: f64,
    r1: f64,
    profile: &TrialProfile,
) -> Result<(f64, f64)> {
    let core = pot.hard_core_radius().unwrap_or(0.0);
    let mut cuts: Vec<f64> = vec![0.0, r1, core, soft.r0, soft.r];
    cuts.extend(pot.breakpoints());
    match profile {
        TrialProfile::PiecewiseLinear(nodes) => cuts.extend(nodes.iter().map(|n| n.0)),
        TrialProfile::Scattering(sol) => cuts.extend(sol.grid.iter().copied()),
    }
    cuts.retain(|c| *c >= 0.0 && *c <= r1);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let (mut lhs, mut rhs) = (0.0, 0.0);
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let (kinetic, u_at): (f64, Box<dyn Fn(f64) -> f64 + '_>) = match profile {
            TrialProfile::PiecewiseLinear(nodes) => {
                let (alpha, beta) = TrialProfile::linear_piece(nodes, lo, hi);
                // u' - u/r = -α/r
                let kin = if alpha == 0.0 {
                    0.0
                } else if lo == 0.0 {
                    f64::INFINITY
                } else {
                    mu * alpha * alpha * (1.0 / lo - 1.0 / hi)
                };
                (kin, Box::new(move |r: f64| alpha + beta * r))
            }
            TrialProfile::Scattering(sol) => {
                let m = 8;
                let h = (hi - lo) / m as f64;
                let kin = (0..m)
                    .map(|i| {
                        gauss5(lo + i as f64 * h, lo + (i + 1) as f64 * h, |r| {
                            let (u, du) = sol.eval(r);
                            mu * (du - u / r).powi(2)
                        })
                    })
                    .sum();
                (kin, Box::new(move |r: f64| sol.eval(r).0))
            }
        };
        lhs += kinetic;
        if hi <= core {
            // u must vanish on the hard core
            let m = 4;
            let h = (hi - lo) / m as f64;
            let mass: f64 = (0..m)
                .map(|i| {
                    gauss5(lo + i as f64 * h, lo + (i + 1) as f64 * h, |r| {
                        u_at(r).powi(2)
                    })
                })
                .sum();
            if mass > 0.0 {
                return Ok((f64::INFINITY, 0.0));
            }
            continue;
        }
        let m = 8;
        let h = (hi - lo) / m as f64;
        for i in 0..m {
            let (p, q) = (lo + i as f64 * h, lo + (i + 1) as f64 * h);
            lhs += gauss5(p, q, |r| 0.5 * pot.value(r) * u_at(r).powi(2));
            rhs += mu * a * gauss5(p, q, |r| soft.value(r) * u_at(r).powi(2));
        }
    }
    Ok((lhs, rhs))
}

/// `lhs - rhs` of the radial inequality on `[0, R1]`. The soft potential
/// must vanish below the range of `pot`.
pub fn dyson_lemma_check(
    pot: &RadialPotential,
    soft: &SoftPotential,
    mu: f64,
    r1: f64,
    profile: &TrialProfile,
) -> Result<f64> {
    let sol = solve_zero_energy(pot, mu, &GridSpec::default())?;
    margin_with_a(pot, soft, mu, sol.a, r1, profile)
}

fn margin_with_a(
    pot: &RadialPotential,
    soft: &SoftPotential,
    mu: f64,
    a: f64,
    r1: f64,
    profile: &TrialProfile,
) -> Result<f64> {
    if !(r1 > 0.0) {
        return invalid(format!("R1 must be positive, got {r1}"));
    }
    if soft.r0 < pot.range() * (1.0 - 1e-12) {
        return invalid(format!(
            "soft potential starts at {} inside the range {}",
            soft.r0,
            pot.range()
        ));
    }
    let norm = soft.height * (soft.r.powi(3) - soft.r0.powi(3)) / 3.0;
    if norm > 1.0 + 1e-12 {
        return invalid(format!("soft potential normalization {norm} exceeds 1"));
    }
    profile.check(r1)?;
    let pot = pot.finite_range(mu)?;
    let (lhs, rhs) = integrate(&pot, soft, mu, a, r1, profile)?;
    Ok(lhs - rhs)
}

/// Margin for the scattering solution against a thin shell `(R - width, R)`
/// with `R1 = R`: `μa(R-a)/R - μa(R-a)²/R² + O(width) = μa²(R-a)/R²`.
pub fn dyson_equality_margin(sol: &ScatteringSolution, radius: f64, width: f64) -> Result<f64> {
    let pot = sol
        .potential()
        .ok_or_else(|| crate::Error::InvalidArgument("solution carries no potential".into()))?
        .clone();
    let soft = SoftPotential::new(radius - width, radius)?;
    margin_with_a(
        &pot,
        &soft,
        sol.mu,
        sol.a,
        radius,
        &TrialProfile::Scattering(Box::new(sol.clone())),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct DysonSuite {
    pub trials: usize,
    pub min_margin: f64,
    /// margins below `-tolerance`
    pub violations: usize,
    pub tolerance: f64,
}

/// Random potentials, soft potentials, segment lengths and piecewise-linear
/// profiles.
pub fn random_dyson_suite(trials: usize, cfg: &McConfig, tolerance: f64) -> Result<DysonSuite> {
    let mut rng = cfg.rng(0);
    let mut min_margin = f64::INFINITY;
    let mut violations = 0;
    for t in 0..trials {
        let mu = rng.gen_range(0.2..2.0);
        let pot = if t % 3 == 0 {
            RadialPotential::hard_core(rng.gen_range(0.2..2.0))?
        } else {
            RadialPotential::square_well(
                10f64.powf(rng.gen_range(-1.0..2.0)),
                rng.gen_range(0.2..2.0),
            )?
        };
        let a = solve_zero_energy(&pot, mu, &GridSpec::default())?.a;
        let range = pot.range();
        let u_lo = range * rng.gen_range(1.0..2.0);
        let soft = SoftPotential::new(u_lo, u_lo + rng.gen_range(0.01..3.0))?;
        let r1 = rng.gen_range(0.5 * range..1.5 * soft.r);
        let core = pot.hard_core_radius();
        let end = r1 * rng.gen_range(1.0..1.3);
        let m = rng.gen_range(2..30);
        let mut rs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..end)).collect();
        rs.push(end);
        if let Some(c) = core {
            rs.push(c);
        }
        rs.retain(|r| *r > 0.0);
        rs.sort_by(f64::total_cmp);
        rs.dedup();
        let mut nodes = vec![(0.0, 0.0)];
        for r in rs {
            let u = match core {
                Some(c) if r <= c => 0.0,
                _ => rng.gen_range(-1.0..2.0) * r,
            };
            nodes.push((r, u));
        }
        let margin = margin_with_a(
            &pot,
            &soft,
            mu,
            a,
            r1,
            &TrialProfile::PiecewiseLinear(nodes),
        )?;
        min_margin = min_margin.min(margin);
        if margin < -tolerance {
            violations += 1;
        }
    }
    Ok(DysonSuite {
        trials,
        min_margin,
        violations,
        tolerance,
    })
}
