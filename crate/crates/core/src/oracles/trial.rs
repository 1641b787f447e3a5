//! Variational energy of the nearest-earlier-neighbor trial state
//! `Ψ = ∏ᵢ f(tᵢ)`, `tᵢ = min_{j<i} |xᵢ - xⱼ|`, in a periodic box.
//!
//! `f(r) = f₀(r)/f₀(b)` below `b` and 1 above, with `f₀ = u/r` the zero-energy
//! scattering solution. The energy is the average of the local energy
//! `μ Σ_k |∇_k ln Ψ|² + Σ_{i<j} v(|xᵢ - xⱼ|)` under `|Ψ|²`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lower_bound::BoxGeometry;
use crate::potential::RadialPotential;
use crate::scattering::ScatteringSolution;

use super::{BatchMeans, EstimateWithError, McConfig};

const TUNE_WINDOW: usize = 50;
const MAX_TIE_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialEstimate {
    /// total energy `⟨H⟩`
    pub energy: EstimateWithError,
    pub kinetic: EstimateWithError,
    pub potential: EstimateWithError,
    pub acceptance: f64,
    pub step_size: f64,
    /// measurements dropped because a nearest-neighbor distance was tied
    pub tie_events: usize,
    pub sweeps: usize,
}

struct Trial<'a> {
    n: usize,
    l: f64,
    b: f64,
    f0b: f64,
    mu: f64,
    sol: &'a ScatteringSolution,
    pot: &'a RadialPotential,
}

impl Trial<'_> {
    fn delta(&self, p: &[f64; 3], q: &[f64; 3]) -> [f64; 3] {
        let mut d = [0.0; 3];
        for k in 0..3 {
            let mut x = p[k] - q[k];
            x -= self.l * (x / self.l).round();
            d[k] = x;
        }
        d
    }

    fn dist(&self, p: &[f64; 3], q: &[f64; 3]) -> f64 {
        let d = self.delta(p, q);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    fn ln_f(&self, r: f64) -> f64 {
        if r >= self.b {
            return 0.0;
        }
        let f = self.sol.f0(r) / self.f0b;
        if f > 0.0 {
            f.ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    /// `d ln f / dr`
    fn dln_f(&self, r: f64) -> f64 {
        if r >= self.b {
            return 0.0;
        }
        let (u, du) = self.sol.eval(r);
        du / u - 1.0 / r
    }

    fn ln_psi(&self, x: &[[f64; 3]]) -> f64 {
        let mut s = 0.0;
        for i in 1..self.n {
            let t = (0..i)
                .map(|j| self.dist(&x[i], &x[j]))
                .fold(f64::INFINITY, f64::min);
            s += self.ln_f(t);
            if s == f64::NEG_INFINITY {
                break;
            }
        }
        s
    }

    /// `(kinetic, potential)`, or `None` on a nearest-neighbor tie.
    fn local_energy(&self, x: &[[f64; 3]]) -> Option<(f64, f64)> {
        let mut grad = vec![[0.0; 3]; self.n];
        for i in 1..self.n {
            let (mut best, mut second, mut jb) = (f64::INFINITY, f64::INFINITY, 0);
            for j in 0..i {
                let d = self.dist(&x[i], &x[j]);
                if d < best {
                    second = best;
                    best = d;
                    jb = j;
                } else if d < second {
                    second = d;
                }
            }
            if best >= self.b {
                continue;
            }
            if second == best {
                return None;
            }
            let g = self.dln_f(best) / best;
            let d = self.delta(&x[i], &x[jb]);
            for k in 0..3 {
                grad[i][k] += g * d[k];
                grad[jb][k] -= g * d[k];
            }
        }
        let kinetic = self.mu
            * grad
                .iter()
                .map(|g| g[0] * g[0] + g[1] * g[1] + g[2] * g[2])
                .sum::<f64>();
        let mut potential = 0.0;
        for i in 0..self.n {
            for j in 0..i {
                potential += self.pot.value(self.dist(&x[i], &x[j]));
            }
        }
        Some((kinetic, potential))
    }
}

struct Chain<'a> {
    trial: &'a Trial<'a>,
    x: Vec<[f64; 3]>,
    ln_psi: f64,
    step: f64,
    rng: ChaCha8Rng,
}

impl Chain<'_> {
    /// one move per particle; returns accepted moves
    fn sweep(&mut self) -> usize {
        let mut accepted = 0;
        for k in 0..self.trial.n {
            let old = self.x[k];
            let mut new = old;
            for c in new.iter_mut() {
                *c = (*c + self.rng.gen_range(-self.step..self.step)).rem_euclid(self.trial.l);
            }
            self.x[k] = new;
            let ln_new = self.trial.ln_psi(&self.x);
            let log_ratio = 2.0 * (ln_new - self.ln_psi);
            if ln_new > f64::NEG_INFINITY
                && (log_ratio >= 0.0 || self.rng.gen::<f64>() < log_ratio.exp())
            {
                self.ln_psi = ln_new;
                accepted += 1;
            } else {
                self.x[k] = old;
            }
        }
        accepted
    }

    /// Burn-in with step adaptation toward half acceptance; returns the
    /// acceptance over the final window.
    fn tune(&mut self, sweeps: usize) -> f64 {
        let cap = 0.5 * self.trial.l;
        let mut last = 0.5;
        let mut done = 0;
        while done < sweeps.max(TUNE_WINDOW) {
            let acc: usize = (0..TUNE_WINDOW).map(|_| self.sweep()).sum();
            last = acc as f64 / (TUNE_WINDOW * self.trial.n) as f64;
            self.step = (self.step * (last / 0.5).clamp(0.5, 2.0)).min(cap);
            done += TUNE_WINDOW;
        }
        last
    }

    fn acceptance_ok(&self, acc: f64) -> bool {
        // a step already at half the box cannot grow any further
        let capped = self.step >= 0.5 * self.trial.l;
        acc >= 0.1 && (acc <= 0.9 || capped)
    }
}

fn run_chain(trial: &Trial, cfg: &McConfig, chain: usize) -> Result<TrialEstimate> {
    let mut rng = cfg.rng(chain);
    let mut x = vec![[0.0; 3]; trial.n];
    let mut ln_psi = f64::NEG_INFINITY;
    for _ in 0..100_000 {
        for p in x.iter_mut() {
            *p = [
                rng.gen_range(0.0..trial.l),
                rng.gen_range(0.0..trial.l),
                rng.gen_range(0.0..trial.l),
            ];
        }
        ln_psi = trial.ln_psi(&x);
        if ln_psi > f64::NEG_INFINITY {
            break;
        }
    }
    if ln_psi == f64::NEG_INFINITY {
        return Err(Error::MonteCarlo(
            "no admissible starting configuration found".into(),
        ));
    }
    let mut ch = Chain {
        trial,
        x,
        ln_psi,
        step: cfg.step_size.min(0.5 * trial.l),
        rng,
    };
    let acc = ch.tune(cfg.burn_in);
    if !ch.acceptance_ok(acc) {
        ch.tune(cfg.burn_in);
    }

    let mut energy = BatchMeans::new(cfg.n_samples, 100);
    let mut kinetic = BatchMeans::new(cfg.n_samples, 100);
    let mut potential = BatchMeans::new(cfg.n_samples, 100);
    let mut ties = 0;
    let mut accepted = 0;
    for _ in 0..cfg.n_samples {
        accepted += ch.sweep();
        match trial.local_energy(&ch.x) {
            Some((k, v)) => {
                energy.push(k + v);
                kinetic.push(k);
                potential.push(v);
            }
            None => ties += 1,
        }
    }
    if ties as f64 > MAX_TIE_FRACTION * cfg.n_samples as f64 {
        return Err(Error::MonteCarlo(format!(
            "{ties} nearest-neighbor ties in {} sweeps",
            cfg.n_samples
        )));
    }
    let acceptance = accepted as f64 / (cfg.n_samples * trial.n) as f64;
    if !ch.acceptance_ok(acceptance) {
        return Err(Error::MonteCarlo(format!(
            "acceptance {acceptance:.3} outside [0.1, 0.9] after retuning (step {:.3e})",
            ch.step
        )));
    }
    Ok(TrialEstimate {
        energy: energy.finish(),
        kinetic: kinetic.finish(),
        potential: potential.finish(),
        acceptance,
        step_size: ch.step,
        tie_events: ties,
        sweeps: cfg.n_samples,
    })
}

/// Metropolis estimate of the trial state's total energy with `n` particles
/// in a periodic box of side `l`; `cfg.n_samples` sweeps per chain.
pub fn trial_energy_mc(
    n: usize,
    l: f64,
    pot: &RadialPotential,
    b: f64,
    sol: &ScatteringSolution,
    cfg: &McConfig,
) -> Result<TrialEstimate> {
    cfg.check()?;
    if cfg.boundary != BoxGeometry::Periodic {
        return invalid("the trial state is defined in a periodic box");
    }
    if n < 2 {
        return invalid(format!("need at least two particles, got {n}"));
    }
    if !(l > 0.0) {
        return invalid(format!("box side must be positive, got {l}"));
    }
    let pot = pot.finite_range(sol.mu)?;
    if !(b > sol.a && b > pot.range()) {
        return invalid(format!(
            "need b > a and b > R0, got b={b}, a={}, R0={}",
            sol.a,
            pot.range()
        ));
    }
    let f0b = sol.f0(b);
    let trial = Trial {
        n,
        l,
        b,
        f0b,
        mu: sol.mu,
        sol,
        pot: &pot,
    };
    let chains: Vec<Result<TrialEstimate>> = (0..cfg.chains)
        .into_par_iter()
        .map(|c| run_chain(&trial, cfg, c))
        .collect();
    let mut parts = Vec::with_capacity(cfg.chains);
    for c in chains {
        parts.push(c?);
    }
    let pick = |f: fn(&TrialEstimate) -> EstimateWithError| {
        EstimateWithError::merge(&parts.iter().map(f).collect::<Vec<_>>())
    };
    Ok(TrialEstimate {
        energy: pick(|p| p.energy),
        kinetic: pick(|p| p.kinetic),
        potential: pick(|p| p.potential),
        acceptance: parts.iter().map(|p| p.acceptance).sum::<f64>() / parts.len() as f64,
        step_size: parts.iter().map(|p| p.step_size).fold(0.0, f64::max),
        tie_events: parts.iter().map(|p| p.tie_events).sum(),
        sweeps: parts.iter().map(|p| p.sweeps).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{solve_zero_energy, GridSpec};
    use std::f64::consts::PI;

    fn periodic(n_samples: usize) -> McConfig {
        McConfig {
            n_samples,
            burn_in: 500,
            boundary: BoxGeometry::Periodic,
            chains: 2,
            ..McConfig::default()
        }
    }

    #[test]
    fn free_gas_has_zero_energy() {
        let pot = RadialPotential::square_well(0.0, 1.0).unwrap();
        let sol = solve_zero_energy(&pot, 1.0, &GridSpec::default()).unwrap();
        let e = trial_energy_mc(4, 10.0, &pot, 2.0, &sol, &periodic(2000)).unwrap();
        assert!(e.energy.mean.abs() < 1e-20, "{}", e.energy.mean);
    }

    #[test]
    fn hard_core_profile_derivative() {
        let pot = RadialPotential::hard_core(1.0).unwrap();
        let sol = solve_zero_energy(&pot, 1.0, &GridSpec::default()).unwrap();
        let t = Trial {
            n: 2,
            l: 50.0,
            b: 10.0,
            f0b: sol.f0(10.0),
            mu: 1.0,
            sol: &sol,
            pot: &pot,
        };
        for r in [1.5, 3.0, 7.0] {
            assert!((t.dln_f(r) - 1.0 / (r * (r - 1.0))).abs() < 1e-9);
            assert!((t.ln_f(r) - ((1.0 - 1.0 / r) / 0.9).ln()).abs() < 1e-12);
        }
        assert_eq!(t.ln_f(0.5), f64::NEG_INFINITY);
        assert_eq!(t.dln_f(12.0), 0.0);
    }

    #[test]
    fn deterministic_and_rejects_bad_input() {
        let pot = RadialPotential::square_well(4.0, 1.0).unwrap();
        let sol = solve_zero_energy(&pot, 0.5, &GridSpec::default()).unwrap();
        let cfg = periodic(500);
        let e1 = trial_energy_mc(4, 8.0, &pot, 3.0, &sol, &cfg).unwrap();
        let e2 = trial_energy_mc(4, 8.0, &pot, 3.0, &sol, &cfg).unwrap();
        assert_eq!(e1, e2);
        assert!(trial_energy_mc(4, 8.0, &pot, 0.5, &sol, &cfg).is_err());
        let free = McConfig {
            boundary: BoxGeometry::Free,
            ..cfg
        };
        assert!(trial_energy_mc(4, 8.0, &pot, 3.0, &sol, &free).is_err());
    }

    #[test]
    fn two_hard_spheres_rough() {
        let (mu, a, l) = (0.5, 1.0, 20.0);
        let pot = RadialPotential::hard_core(a).unwrap();
        let sol = solve_zero_energy(&pot, mu, &GridSpec::default()).unwrap();
        let b = 0.6 * l;
        let e = trial_energy_mc(2, l, &pot, b, &sol, &periodic(200_000)).unwrap();
        let target = 8.0 * PI * mu * a / l.powi(3);
        assert!(
            (e.energy.mean / target - 1.0).abs() < 0.3,
            "{} vs {target}",
            e.energy.mean
        );
    }
}
