//! Maximizing the thermodynamic lower ratio over `(ε, R, ℓ)`.
//!
//! The objective is `ln(1 - ratio)` on the feasible set and `ln(1 + violation)`
//! outside it, so every feasible point beats every infeasible one and the
//! simplex can still crawl toward feasibility. A log-spaced grid seeds a few
//! Nelder-Mead runs.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    ratio_scaled, Eval, LowerBoundParams, Scaled, ANSATZ_EXPONENTS, GAP_PREFACTOR_LITERAL,
};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// exponents fixed at `(1/17, 6/17, 3/17)`, search over the constants
    PowerLaw,
    /// search over `(ε, ℓ, R)` directly
    FreeSearch,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::PowerLaw => "power-law",
            Strategy::FreeSearch => "free-search",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power-law" | "ansatz" => Ok(Strategy::PowerLaw),
            "free-search" | "free" => Ok(Strategy::FreeSearch),
            other => invalid(format!("unknown strategy '{other}'")),
        }
    }
}

/// Grid size and local-refinement effort. Only `nm_iters` should be varied
/// when comparing budgets: the best value found is then nondecreasing in it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub grid_per_axis: usize,
    pub starts: usize,
    pub nm_iters: u64,
    pub gap: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            grid_per_axis: 16,
            starts: 4,
            nm_iters: 600,
            gap: GAP_PREFACTOR_LITERAL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimized {
    pub strategy: Strategy,
    pub y: f64,
    pub a: f64,
    pub params: LowerBoundParams,
    pub ratio: f64,
    /// `1 - ratio`, accurate even when the ratio rounds to 1
    pub deficit: f64,
    pub feasible: bool,
    pub evaluations: usize,
    pub diagnostic: Option<String>,
}

#[derive(Clone, Copy)]
struct Problem {
    strategy: Strategy,
    y: f64,
    a: f64,
    /// `R0/a`
    core: f64,
    gap: f64,
}

impl Problem {
    fn scaled(&self, z: &[f64]) -> (f64, Scaled) {
        match self.strategy {
            Strategy::PowerLaw => {
                let [al, be, ga] = ANSATZ_EXPONENTS;
                let eps = z[0].exp() * self.y.powf(al);
                let x = z[1].exp() * self.y.powf(be);
                let d = z[2].exp() * self.y.powf(ga);
                let r = (d + (self.core * x).powi(3)).cbrt();
                (self.occupation(x), Scaled { eps, x, d, r })
            }
            Strategy::FreeSearch => {
                let eps = z[0].exp();
                let x = (-z[1]).exp();
                let delta = z[2].exp();
                let big = self.core + delta;
                let d = x.powi(3) * delta * (big * big + big * self.core + self.core * self.core);
                (
                    self.occupation(x),
                    Scaled {
                        eps,
                        x,
                        d,
                        r: big * x,
                    },
                )
            }
        }
    }

    fn occupation(&self, x: f64) -> f64 {
        3.0 * self.y / (4.0 * PI) / x.powi(3)
    }

    fn eval(&self, z: &[f64]) -> Eval {
        let (k, s) = self.scaled(z);
        ratio_scaled(k, &s, self.gap)
    }

    fn objective(&self, z: &[f64]) -> f64 {
        if z.iter().any(|v| !v.is_finite()) {
            return f64::MAX;
        }
        match self.eval(z) {
            Eval::Positive { ln_value } => (-ln_value.exp_m1()).ln(),
            Eval::Fallback { violation } => violation.ln_1p(),
        }
    }

    fn params(&self, z: &[f64]) -> LowerBoundParams {
        let (_, s) = self.scaled(z);
        let ell = self.a / s.x;
        let mut p = LowerBoundParams::new(s.eps, s.r * ell, ell, self.core * self.a);
        if self.strategy == Strategy::PowerLaw {
            p.exponents = Some(ANSATZ_EXPONENTS);
            p.constants = Some([z[0].exp(), z[1].exp(), z[2].exp()]);
        }
        p
    }

    /// free-search coordinates of a parameter set
    fn free_coords(&self, p: &LowerBoundParams) -> Vec<f64> {
        vec![
            p.eps.ln(),
            (p.ell / self.a).ln(),
            ((p.r - p.r0) / self.a).ln(),
        ]
    }

    fn bounds(&self) -> [(f64, f64); 3] {
        match self.strategy {
            Strategy::PowerLaw => [
                (0.01f64.ln(), 100f64.ln()),
                (0.01f64.ln(), 10f64.ln()),
                (1e-3f64.ln(), 100f64.ln()),
            ],
            Strategy::FreeSearch => {
                let ly = self.y.ln();
                [
                    (1e-6f64.ln(), 0.95f64.ln()),
                    (0.5f64.ln() - ly / 3.0, 10f64.ln() - ly / 2.0),
                    (1e-3f64.ln(), -ly / 3.0),
                ]
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    obj: f64,
    z: Vec<f64>,
    eps: f64,
    r: f64,
    ell: f64,
}

impl Candidate {
    fn new(problem: &Problem, z: Vec<f64>) -> Self {
        let p = problem.params(&z);
        Self {
            obj: problem.objective(&z),
            z,
            eps: p.eps,
            r: p.r,
            ell: p.ell,
        }
    }

    /// ratio first, then smallest ε, R, ℓ
    fn key_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.obj
            .total_cmp(&other.obj)
            .then(self.eps.total_cmp(&other.eps))
            .then(self.r.total_cmp(&other.r))
            .then(self.ell.total_cmp(&other.ell))
    }
}

struct Cost<'a> {
    problem: &'a Problem,
    calls: &'a AtomicUsize,
}

impl CostFunction for Cost<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, z: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        Ok(self.problem.objective(z))
    }
}

fn nelder_mead(problem: &Problem, start: &[f64], iters: u64, calls: &AtomicUsize) -> Vec<f64> {
    let step = 0.3;
    let mut simplex = vec![start.to_vec()];
    for i in 0..start.len() {
        let mut v = start.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let solver = match NelderMead::new(simplex).with_sd_tolerance(1e-13) {
        Ok(s) => s,
        Err(_) => return start.to_vec(),
    };
    let cost = Cost { problem, calls };
    match Executor::new(cost, solver)
        .configure(|s| s.max_iters(iters))
        .run()
    {
        Ok(res) => res
            .state()
            .get_best_param()
            .cloned()
            .unwrap_or_else(|| start.to_vec()),
        Err(_) => start.to_vec(),
    }
}

fn search(
    problem: &Problem,
    budget: &SearchBudget,
    extra: Option<Vec<f64>>,
    calls: &AtomicUsize,
) -> Candidate {
    let g = budget.grid_per_axis.max(2);
    let b = problem.bounds();
    let axis = |i: usize, j: usize| b[i].0 + (b[i].1 - b[i].0) * j as f64 / (g - 1) as f64;
    let mut grid: Vec<Candidate> = (0..g * g * g)
        .into_par_iter()
        .map(|idx| {
            let z = vec![
                axis(0, idx / (g * g)),
                axis(1, (idx / g) % g),
                axis(2, idx % g),
            ];
            Candidate::new(problem, z)
        })
        .collect();
    calls.fetch_add(grid.len(), Ordering::Relaxed);
    if let Some(z) = extra {
        grid.push(Candidate::new(problem, z));
    }
    grid.sort_by(|p, q| p.key_cmp(q));
    let starts: Vec<Candidate> = grid.into_iter().take(budget.starts.max(1)).collect();
    let refined: Vec<Candidate> = starts
        .par_iter()
        .map(|c| {
            let z = nelder_mead(problem, &c.z, budget.nm_iters, calls);
            let fresh = Candidate::new(problem, z);
            if fresh.key_cmp(c).is_lt() {
                fresh
            } else {
                c.clone()
            }
        })
        .collect();
    refined
        .into_iter()
        .min_by(|p, q| p.key_cmp(q))
        .expect("at least one start")
}

/// Best thermodynamic lower ratio for a gas of dilution `Y` whose pair
/// potential has scattering length `a` and range `r0`. Deterministic.
pub fn optimize_parameters(
    y: f64,
    a: f64,
    r0: f64,
    strategy: Strategy,
    budget: &SearchBudget,
) -> Result<Optimized> {
    if !(y > 0.0 && y < 1.0) {
        return invalid(format!("Y must lie in (0, 1), got {y}"));
    }
    if !(a > 0.0 && r0 >= a) {
        return invalid(format!("need 0 < a <= R0, got a={a}, R0={r0}"));
    }
    let calls = AtomicUsize::new(0);
    let ansatz = Problem {
        strategy: Strategy::PowerLaw,
        y,
        a,
        core: r0 / a,
        gap: budget.gap,
    };
    let ansatz_best = search(&ansatz, budget, None, &calls);
    let (problem, best) = match strategy {
        Strategy::PowerLaw => (ansatz, ansatz_best),
        Strategy::FreeSearch => {
            let free = Problem {
                strategy: Strategy::FreeSearch,
                ..ansatz
            };
            let seed = free.free_coords(&ansatz.params(&ansatz_best.z));
            let found = search(&free, budget, Some(seed), &calls);
            // keep the ansatz optimum itself if the free coordinates lose it to rounding
            let ansatz_eval = ansatz.eval(&ansatz_best.z);
            if free.eval(&found.z).value() < ansatz_eval.value() {
                let mut p = ansatz.params(&ansatz_best.z);
                p.exponents = None;
                p.constants = None;
                return Ok(finish(
                    Strategy::FreeSearch,
                    y,
                    a,
                    p,
                    ansatz_eval,
                    calls.into_inner(),
                ));
            }
            (free, found)
        }
    };
    let eval = problem.eval(&best.z);
    Ok(finish(
        strategy,
        y,
        a,
        problem.params(&best.z),
        eval,
        calls.into_inner(),
    ))
}

fn finish(
    strategy: Strategy,
    y: f64,
    a: f64,
    params: LowerBoundParams,
    eval: Eval,
    evaluations: usize,
) -> Optimized {
    let feasible = matches!(eval, Eval::Positive { .. });
    Optimized {
        strategy,
        y,
        a,
        params,
        ratio: eval.value(),
        deficit: eval.deficit(),
        feasible,
        evaluations,
        diagnostic: (!feasible).then(|| {
            format!("no feasible (eps, R, ell) found at Y = {y:e}; ratio falls back to 0")
        }),
    }
}

/// Least-squares fit of `ln(1 - ratio) = ln C + s ln Y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    /// `C` of the free-slope fit
    pub c: f64,
    /// `C` with the slope pinned at `1/17`
    pub c_fixed_slope: f64,
    pub points: usize,
}

pub fn fit_rate(ys: &[f64], deficits: &[f64]) -> Result<RateFit> {
    if ys.len() != deficits.len() || ys.len() < 2 {
        return invalid("need at least two (Y, deficit) pairs of equal length");
    }
    if ys.iter().chain(deficits).any(|v| !(*v > 0.0)) {
        return invalid("Y and deficits must be positive");
    }
    let lx: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let ly: Vec<f64> = deficits.iter().map(|d| d.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return invalid("Y values must not all coincide");
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let c = (my - slope * mx).exp();
    let c_fixed_slope = (my - mx / 17.0).exp();
    Ok(RateFit {
        slope,
        c,
        c_fixed_slope,
        points: ys.len(),
    })
}
