//! Zero-energy scattering: `-2μ u'' + v u = 0`, `u(0) = 0` (or `u(R_core) = 0`),
//! normalized so that `u(r) = r - a` outside the range of `v`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::RadialPotential;
use crate::quadrature::GAUSS_LEGENDRE_3;

/// Resolution request for the radial integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Steps across the core region `[0, R0]` before local refinement.
    pub steps_per_range: usize,
    /// Largest allowed `κ h` where `κ = sqrt(v / 2μ)` on a segment.
    pub max_kappa_step: f64,
    /// Geometric growth factor of the steps through a power tail.
    pub tail_ratio: f64,
    /// Outermost exterior point, as a multiple of the range.
    pub exterior_factor: f64,
    pub exterior_points: usize,
    /// Accepted estimated error of `a`, relative to `max(a, range)`.
    pub tolerance: f64,
    /// Accepted estimated relative error of the discrete radial minimum.
    pub fem_tolerance: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            steps_per_range: 2000,
            max_kappa_step: 0.02,
            tail_ratio: 1.002,
            exterior_factor: 10.0,
            exterior_points: 24,
            tolerance: 1e-9,
            fem_tolerance: 1e-4,
        }
    }
}

impl GridSpec {
    pub fn with_steps(steps_per_range: usize) -> Self {
        Self {
            steps_per_range,
            max_kappa_step: f64::INFINITY,
            ..Self::default()
        }
    }
}

/// Radial nodes from the inner boundary to the range of a finite-range
/// potential. Every breakpoint of `v` is a node.
pub(crate) fn radial_nodes(pot: &RadialPotential, mu: f64, grid: &GridSpec) -> Vec<f64> {
    let start = pot.hard_core_radius().unwrap_or(0.0);
    let range = pot.range();
    let r0 = pot.core_radius().min(range);
    let h_base = r0.max(f64::MIN_POSITIVE) / grid.steps_per_range.max(1) as f64;
    let mut edges = vec![start];
    edges.extend(
        pot.breakpoints()
            .into_iter()
            .filter(|&b| b > start && b < range),
    );
    edges.push(range);
    edges.dedup();

    let mut nodes = vec![start];
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let in_tail = lo >= r0 && pot.tail().is_some();
        // largest v on the segment: endpoints plus midpoint cover the
        // piecewise-constant and piecewise-linear kinds.
        let vmax = [lo.next_up(), 0.5 * (lo + hi), hi]
            .iter()
            .map(|&r| pot.value(r))
            .fold(0.0, f64::max);
        let kappa = (vmax / (2.0 * mu)).sqrt();
        let h_kappa = if kappa > 0.0 {
            grid.max_kappa_step / kappa
        } else {
            f64::INFINITY
        };
        if in_tail {
            let mut r = lo;
            while r < hi {
                let h = (r * (grid.tail_ratio - 1.0)).max(h_base).min(h_kappa);
                r = if r + h >= hi * (1.0 - 1e-12) {
                    hi
                } else {
                    r + h
                };
                nodes.push(r);
            }
        } else {
            let h = h_base.min(h_kappa);
            let n = ((hi - lo) / h).ceil().max(1.0) as usize;
            for i in 1..=n {
                nodes.push(if i == n {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / n as f64
                });
            }
        }
    }
    nodes
}

/// Exact-outside solution of the zero-energy equation together with the
/// cumulative energy density `J(r) = ∫ {2μ(u' - u/r)² + v u²} dr`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScatteringSolution {
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// Cumulative energy integral at each grid point (up to the range).
    pub energy: Vec<f64>,
    pub a: f64,
    pub mu: f64,
    pub potential_id: String,
    /// Range of the (possibly truncated) potential that was solved.
    pub range: f64,
    pub hard_core: Option<f64>,
    /// Step-doubling estimate of the error in `a`.
    pub error_estimate: f64,
    #[serde(skip)]
    potential: Option<RadialPotential>,
}

struct RawSolution {
    grid: Vec<f64>,
    u: Vec<f64>,
    du: Vec<f64>,
    energy: Vec<f64>,
}

fn integrand(mu: f64, r: f64, u: f64, du: f64, v: f64) -> f64 {
    let shear = if r > 0.0 { du - u / r } else { 0.0 };
    2.0 * mu * shear * shear + v * u * u
}

/// Classical RK4 on `(u, u', J)` over the given nodes; every step stays
/// inside one smooth piece of `v`.
fn integrate(pot: &RadialPotential, mu: f64, nodes: &[f64]) -> RawSolution {
    let n = nodes.len();
    let mut u = Vec::with_capacity(n);
    let mut du = Vec::with_capacity(n);
    let mut energy = Vec::with_capacity(n);
    let (mut y0, mut y1, mut j) = (0.0_f64, 1.0_f64, 0.0_f64);
    u.push(y0);
    du.push(y1);
    energy.push(j);
    let two_mu = 2.0 * mu;
    for w in nodes.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let h = hi - lo;
        let left = lo.next_up();
        let v_at = |r: f64| pot.value(r.clamp(left, hi));
        let rhs = |r: f64, a: f64, b: f64| {
            let v = v_at(r);
            (b, v * a / two_mu, integrand(mu, r, a, b, v))
        };
        let (k1u, k1d, k1j) = rhs(lo, y0, y1);
        let mid = lo + 0.5 * h;
        let (k2u, k2d, k2j) = rhs(mid, y0 + 0.5 * h * k1u, y1 + 0.5 * h * k1d);
        let (k3u, k3d, k3j) = rhs(mid, y0 + 0.5 * h * k2u, y1 + 0.5 * h * k2d);
        let (k4u, k4d, k4j) = rhs(hi, y0 + h * k3u, y1 + h * k3d);
        y0 += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        y1 += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        j += h / 6.0 * (k1j + 2.0 * k2j + 2.0 * k3j + k4j);
        if y1.abs() > 1e100 {
            // linear equation: rescale everything stored so far
            let c = 1e-100;
            y0 *= c;
            y1 *= c;
            j *= c * c;
            u.iter_mut().for_each(|x| *x *= c);
            du.iter_mut().for_each(|x| *x *= c);
            energy.iter_mut().for_each(|x| *x *= c * c);
        }
        u.push(y0);
        du.push(y1);
        energy.push(j);
    }
    RawSolution {
        grid: nodes.to_vec(),
        u,
        du,
        energy,
    }
}

fn halve(nodes: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * nodes.len());
    for w in nodes.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*nodes.last().expect("non-empty grid"));
    out
}

fn extract_a(raw: &RawSolution) -> Result<f64> {
    let r = *raw.grid.last().unwrap();
    let u = *raw.u.last().unwrap();
    let du = *raw.du.last().unwrap();
    if !(du > 0.0) || !du.is_finite() {
        return Err(Error::NoConvergence(format!(
            "u'(R) = {du} at the range; expected a positive slope"
        )));
    }
    Ok(r - u / du)
}

/// Solves the zero-energy scattering equation.
///
/// Infinite power tails are truncated at [`RadialPotential::default_cutoff`].
/// The returned solution carries the scattering length and a step-doubling
/// error estimate; the call fails if that estimate exceeds `grid.tolerance`.
pub fn solve_zero_energy(
    pot: &RadialPotential,
    mu: f64,
    grid: &GridSpec,
) -> Result<ScatteringSolution> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "mu must be positive, got {mu}"
        )));
    }
    let pot = pot.finite_range(mu)?;
    let range = pot.range();
    let coarse_nodes = radial_nodes(&pot, mu, grid);
    let coarse = integrate(&pot, mu, &coarse_nodes);
    let fine = integrate(&pot, mu, &halve(&coarse_nodes));
    let a_coarse = extract_a(&coarse)?;
    let a = extract_a(&fine)?;
    let error_estimate = (a - a_coarse).abs() / 15.0;
    let scale = a.abs().max(range);
    if !(error_estimate <= grid.tolerance * scale) {
        return Err(Error::NoConvergence(format!(
            "estimated error {error_estimate:.3e} in a exceeds tolerance {:.1e}",
            grid.tolerance * scale
        )));
    }

    let RawSolution {
        grid: mut nodes,
        mut u,
        mut du,
        mut energy,
    } = fine;
    let s = 1.0 / du.last().unwrap();
    u.iter_mut().for_each(|x| *x *= s);
    du.iter_mut().for_each(|x| *x *= s);
    energy.iter_mut().for_each(|x| *x *= s * s);
    let hard_core = pot.hard_core_radius();
    if let Some(core) = hard_core {
        // u vanishes on [0, R_core]
        nodes.insert(0, 0.0);
        u.insert(0, 0.0);
        du.insert(0, 0.0);
        energy.insert(0, 0.0);
        debug_assert!(nodes[1] == core);
    }

    // exterior: exactly r - a
    let e_last = *energy.last().unwrap();
    let outer = grid.exterior_factor.max(1.0) * range;
    let m = grid.exterior_points.max(2);
    let q = (outer / range).powf(1.0 / m as f64);
    let mut r = range;
    for _ in 0..m {
        r *= q;
        nodes.push(r);
        u.push(r - a);
        du.push(1.0);
        energy.push(e_last + 2.0 * mu * a * a * (1.0 / range - 1.0 / r));
    }

    Ok(ScatteringSolution {
        grid: nodes,
        u,
        du,
        energy,
        a,
        mu,
        potential_id: pot.label(),
        range,
        hard_core,
        error_estimate,
        potential: Some(pot),
    })
}

/// `a = r - u/u'` at the outermost grid point, cross-checked against the
/// second-outermost.
pub fn scattering_length(sol: &ScatteringSolution) -> Result<f64> {
    let n = sol.grid.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "solution grid has fewer than two points".into(),
        ));
    }
    let at = |i: usize| -> Result<f64> {
        let d = sol.du[i];
        if !(d > 0.0) {
            return Err(Error::NoConvergence(format!(
                "u' = {d} at r = {}",
                sol.grid[i]
            )));
        }
        Ok(sol.grid[i] - sol.u[i] / d)
    };
    let outer = at(n - 1)?;
    let inner = at(n - 2)?;
    let scale = outer.abs().max(sol.range);
    if (outer - inner).abs() > 1e-9 * scale {
        return Err(Error::NoConvergence(format!(
            "scattering length not converged at the outer grid: {outer} vs {inner}"
        )));
    }
    Ok(outer)
}

impl ScatteringSolution {
    pub fn potential(&self) -> Option<&RadialPotential> {
        self.potential.as_ref()
    }

    fn locate(&self, r: f64) -> usize {
        self.grid
            .partition_point(|&g| g <= r)
            .clamp(1, self.grid.len() - 1)
            - 1
    }

    /// `(u, u')` at any radius: cubic Hermite inside the grid, exact
    /// `r - a` beyond the range.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        if r >= self.range {
            return (r - self.a, 1.0);
        }
        if let Some(core) = self.hard_core {
            if r <= core {
                return (0.0, 0.0);
            }
        }
        if r <= 0.0 {
            return (0.0, self.du[0]);
        }
        let i = self.locate(r);
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let h = x1 - x0;
        let t = (r - x0) / h;
        let (p0, p1, m0, m1) = (self.u[i], self.u[i + 1], self.du[i] * h, self.du[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let val = (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1;
        let der = ((6.0 * t2 - 6.0 * t) * p0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * p1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        (val, der)
    }

    /// `f0 = u/r`.
    pub fn f0(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return self.du[0];
        }
        self.eval(r).0 / r
    }

    /// `∫_0^R {2μ(u' - u/r)² + v u²} dr` for `R` at or beyond the range.
    pub fn energy_integral(&self, radius: f64) -> Result<f64> {
        if radius < self.range * (1.0 - 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "R = {radius} lies inside the potential range {}",
                self.range
            )));
        }
        let i_range = self
            .grid
            .partition_point(|&g| g < self.range * (1.0 - 1e-14));
        let j_range = self.energy[i_range.min(self.energy.len() - 1)];
        let a = self.a;
        Ok(j_range + 2.0 * self.mu * a * a * (1.0 / self.range - 1.0 / radius.max(self.range)))
    }
}

/// Both sides of the partial-integration identity on a ball of radius `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyIdentity {
    pub radius: f64,
    /// `4π ∫_0^R {2μ[u' - u/r]² + v u²} dr`.
    pub lhs: f64,
    /// `8πμ a u(R)² / R²`.
    pub rhs: f64,
    /// Boundary term left by the integration by parts,
    /// `8πμ u(R) (u'(R) - u(R)/R)`; equals `8πμ a (1 - a/R)` outside the range.
    pub flux: f64,
}

fn rel(x: f64, y: f64) -> f64 {
    if x == y {
        0.0
    } else {
        (x - y).abs() / y.abs().max(x.abs())
    }
}

impl EnergyIdentity {
    /// `|lhs - rhs| / rhs` (zero when both sides vanish).
    pub fn residual(&self) -> f64 {
        if self.lhs == 0.0 && self.rhs == 0.0 {
            0.0
        } else {
            (self.lhs - self.rhs).abs() / self.rhs.abs()
        }
    }

    pub fn flux_residual(&self) -> f64 {
        rel(self.lhs, self.flux)
    }
}

pub fn energy_identity(sol: &ScatteringSolution, radius: f64) -> Result<EnergyIdentity> {
    let lhs = 4.0 * PI * sol.energy_integral(radius)?;
    let (u, du) = sol.eval(radius);
    let rhs = 8.0 * PI * sol.mu * sol.a * u * u / (radius * radius);
    let flux = 8.0 * PI * sol.mu * u * (du - u / radius);
    Ok(EnergyIdentity {
        radius,
        lhs,
        rhs,
        flux,
    })
}

/// Discrete minimizer of `∫_0^R {μ[u' - u/r]² + ½ v u²} dr` with `u(0) = 0`
/// (or zero on the hard core) and `u(R)` fixed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialMinimum {
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub value: f64,
    /// Difference to the same problem on every other node, scaled by the
    /// P1 convergence order.
    pub error_estimate: f64,
}

/// Piecewise-linear Ritz minimization. The element kinetic term is exact
/// for linear `u` (`u' - u/r = -α/r` on each element); the potential term
/// uses 3-point Gauss-Legendre.
fn p1_minimize(
    pot: &RadialPotential,
    mu: f64,
    nodes: &[f64],
    boundary_value: f64,
) -> (Vec<f64>, f64) {
    let n = nodes.len();
    // symmetric tridiagonal quadratic form: diag[i], off[i] couples i and i+1
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for i in 0..n - 1 {
        let (ri, rj) = (nodes[i], nodes[i + 1]);
        let h = rj - ri;
        if ri > 0.0 {
            let c = mu / (h * ri * rj);
            diag[i] += c * rj * rj;
            diag[i + 1] += c * ri * ri;
            off[i] -= c * ri * rj;
        }
        let (mut mii, mut mjj, mut mij) = (0.0, 0.0, 0.0);
        for &(x, w) in GAUSS_LEGENDRE_3.iter() {
            let t = 0.5 * (x + 1.0);
            let r = ri + h * t;
            let v = pot.value(r);
            let wv = 0.5 * h * w * v;
            mii += wv * (1.0 - t) * (1.0 - t);
            mjj += wv * t * t;
            mij += wv * t * (1.0 - t);
        }
        diag[i] += 0.5 * mii;
        diag[i + 1] += 0.5 * mjj;
        off[i] += 0.5 * mij;
    }
    // unknowns: nodes 1..n-2 (node 0 and node n-1 are fixed)
    let m = n - 2;
    let mut u = vec![0.0; n];
    u[n - 1] = boundary_value;
    if m > 0 {
        let mut b = vec![0.0; m];
        b[m - 1] = -off[n - 2] * boundary_value;
        let sub: Vec<f64> = (0..m).map(|k| if k == 0 { 0.0 } else { off[k] }).collect();
        let sup: Vec<f64> = (0..m)
            .map(|k| if k + 1 < m { off[k + 1] } else { 0.0 })
            .collect();
        let d: Vec<f64> = (0..m).map(|k| diag[k + 1]).collect();
        let x = thomas(&sub, &d, &sup, &b);
        u[1..n - 1].copy_from_slice(&x);
    }
    let mut value = 0.0;
    for i in 0..n {
        value += diag[i] * u[i] * u[i];
        if i + 1 < n {
            value += 2.0 * off[i] * u[i] * u[i + 1];
        }
    }
    (u, value)
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

pub fn radial_form_minimize(
    pot: &RadialPotential,
    mu: f64,
    radius: f64,
    boundary_value: f64,
    grid: &GridSpec,
) -> Result<RadialMinimum> {
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mu must be positive, got {mu}"
        )));
    }
    if !(boundary_value > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "boundary value must be positive, got {boundary_value}"
        )));
    }
    let pot = pot.finite_range(mu)?;
    if radius < pot.range() {
        return Err(Error::InvalidArgument(format!(
            "R = {radius} lies inside the range {}",
            pot.range()
        )));
    }
    let mut nodes = radial_nodes(&pot, mu, grid);
    let range = pot.range();
    if radius > range {
        let h = (range / grid.steps_per_range.max(1) as f64).max((radius - range) / 4096.0);
        let k = ((radius - range) / h).ceil() as usize;
        for i in 1..=k {
            nodes.push(if i == k {
                radius
            } else {
                range + (radius - range) * i as f64 / k as f64
            });
        }
    }
    let (u, value) = p1_minimize(&pot, mu, &nodes, boundary_value);
    // every other node keeps all breakpoints only when they sit on even
    // indices; coarsen by merging pairs inside each smooth piece instead.
    let breaks = pot.breakpoints();
    let coarse: Vec<f64> = nodes
        .iter()
        .enumerate()
        .filter(|(i, r)| {
            i % 2 == 0
                || *i == nodes.len() - 1
                || breaks.iter().any(|b| (*b - **r).abs() < 1e-14 * b.max(1.0))
        })
        .map(|(_, r)| *r)
        .collect();
    let (_, value_coarse) = p1_minimize(&pot, mu, &coarse, boundary_value);
    let error_estimate = (value - value_coarse).abs() / 3.0;
    // a vanishing potential gives a vanishing minimum; measure against the
    // free value μ B² / R instead
    let scale = value
        .abs()
        .max(mu * boundary_value * boundary_value / radius);
    if error_estimate > grid.fem_tolerance * scale {
        return Err(Error::NoConvergence(format!(
            "discretization too coarse: estimated relative error {:.2e}",
            error_estimate / scale
        )));
    }
    let mut full_grid = nodes;
    let mut full_u = u;
    if let Some(core) = pot.hard_core_radius() {
        if core > 0.0 {
            full_grid.insert(0, 0.0);
            full_u.insert(0, 0.0);
        }
    }
    Ok(RadialMinimum {
        grid: full_grid,
        u: full_u,
        value,
        error_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Shell;
    use approx::assert_relative_eq;

    /// Matching `A sinh(κr)` to `r - a` at the well edge.
    fn square_well_a(v0: f64, r0: f64, mu: f64) -> f64 {
        let k = (v0 / (2.0 * mu)).sqrt();
        if k == 0.0 {
            return 0.0;
        }
        r0 * (1.0 - (k * r0).tanh() / (k * r0))
    }

    #[test]
    fn hard_core_is_exact() {
        let p = RadialPotential::hard_core(1.0).unwrap();
        let s = solve_zero_energy(&p, 1.0, &GridSpec::default()).unwrap();
        assert!((s.a - 1.0).abs() < 1e-12);
        for (r, u) in s.grid.iter().zip(&s.u) {
            if *r >= 1.0 {
                assert!((u - (r - 1.0)).abs() < 1e-12);
            } else {
                assert_eq!(*u, 0.0);
            }
        }
        assert!((scattering_length(&s).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_potential() {
        let s = solve_zero_energy(&RadialPotential::zero(), 0.5, &GridSpec::default()).unwrap();
        assert_eq!(s.a, 0.0);
        for (r, u) in s.grid.iter().zip(&s.u) {
            assert!((u - r).abs() < 1e-14);
        }
    }

    #[test]
    fn square_well_closed_form() {
        let p = RadialPotential::square_well(4.0, 1.0).unwrap();
        let s = solve_zero_energy(&p, 0.5, &GridSpec::default()).unwrap();
        let exact = 1.0 - 2.0_f64.tanh() / 2.0;
        assert_relative_eq!(s.a, exact, max_relative = 1e-10);
        assert!((s.a - 0.5180).abs() < 5e-5);
    }

    #[test]
    fn strong_well_does_not_overflow() {
        let p = RadialPotential::square_well(1e6, 1.0).unwrap();
        let s = solve_zero_energy(&p, 0.5, &GridSpec::default()).unwrap();
        assert_relative_eq!(s.a, square_well_a(1e6, 1.0, 0.5), max_relative = 1e-8);
        assert!(s.u.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn solution_is_monotone() {
        let p = RadialPotential::shells(vec![
            Shell {
                outer: 0.3,
                height: 10.0,
            },
            Shell {
                outer: 0.8,
                height: 1.0,
            },
            Shell {
                outer: 1.5,
                height: 3.0,
            },
        ])
        .unwrap();
        let s = solve_zero_energy(&p, 0.5, &GridSpec::default()).unwrap();
        assert!(s.u.windows(2).all(|w| w[1] >= w[0]));
        assert!(s.du.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn rk4_converges_at_fourth_order() {
        let (v0, r0, mu) = (9.0, 1.0, 0.5);
        let p = RadialPotential::square_well(v0, r0).unwrap();
        let exact = square_well_a(v0, r0, mu);
        let err = |n: usize| {
            let nodes = radial_nodes(&p, mu, &GridSpec::with_steps(n));
            let raw = integrate(&p, mu, &nodes);
            (extract_a(&raw).unwrap() - exact).abs()
        };
        for n in [10, 20, 40] {
            let ratio = err(n) / err(2 * n);
            assert!(ratio > 14.0, "n = {n}: error ratio {ratio}");
        }
    }

    #[test]
    fn monotone_in_potential() {
        let mu = 0.5;
        let mut prev = 0.0;
        for v0 in [0.1, 0.5, 1.0, 3.0, 10.0, 100.0] {
            let a = solve_zero_energy(
                &RadialPotential::square_well(v0, 1.0).unwrap(),
                mu,
                &GridSpec::default(),
            )
            .unwrap()
            .a;
            assert!(a > prev);
            prev = a;
        }
        // nested wells: wider support is larger pointwise
        let inner = RadialPotential::square_well(2.0, 1.0).unwrap();
        let outer = RadialPotential::shells(vec![
            Shell {
                outer: 1.0,
                height: 2.0,
            },
            Shell {
                outer: 1.5,
                height: 0.5,
            },
        ])
        .unwrap();
        let ai = solve_zero_energy(&inner, mu, &GridSpec::default())
            .unwrap()
            .a;
        let ao = solve_zero_energy(&outer, mu, &GridSpec::default())
            .unwrap()
            .a;
        assert!(ai <= ao);
        // and everything is below the hard core of the same range
        assert!(ao < 1.5);
    }

    #[test]
    fn energy_identity_examples() {
        let hc = solve_zero_energy(
            &RadialPotential::hard_core(1.0).unwrap(),
            1.0,
            &GridSpec::default(),
        )
        .unwrap();
        let id = energy_identity(&hc, 5.0).unwrap();
        assert_relative_eq!(id.rhs, 8.0 * PI * 0.64, max_relative = 1e-12);
        // boundary term 8πμ a (1 - a/R)
        assert_relative_eq!(id.flux, 8.0 * PI * 0.8, max_relative = 1e-12);
        assert_relative_eq!(id.lhs, id.flux, max_relative = 1e-10);

        let z = solve_zero_energy(&RadialPotential::zero(), 1.0, &GridSpec::default()).unwrap();
        let id = energy_identity(&z, 3.0).unwrap();
        assert_eq!((id.lhs, id.rhs), (0.0, 0.0));
        assert_eq!(id.residual(), 0.0);

        let sw = solve_zero_energy(
            &RadialPotential::square_well(4.0, 1.0).unwrap(),
            0.5,
            &GridSpec::default(),
        )
        .unwrap();
        let id = energy_identity(&sw, 10.0).unwrap();
        assert!(id.flux_residual() < 1e-8, "{id:?}");
        assert!(energy_identity(&sw, 0.5).is_err());
    }

    #[test]
    fn energy_identity_lhs_matches_independent_quadrature() {
        // Gauss-Legendre over Hermite-interpolated u, independent of the
        // integral carried along by the ODE.
        let pot = RadialPotential::tabulated(vec![(0.0, 3.0), (0.7, 1.0), (1.2, 0.0)]).unwrap();
        let mu = 0.5;
        let s = solve_zero_energy(&pot, mu, &GridSpec::default()).unwrap();
        let mut sum = 0.0;
        for w in s.grid.windows(2) {
            let (lo, hi) = (w[0], w[1].min(3.0));
            if lo >= 3.0 {
                break;
            }
            for &(x, wt) in crate::quadrature::GAUSS_LEGENDRE_3.iter() {
                let r = lo + (hi - lo) * 0.5 * (x + 1.0);
                let (u, du) = s.eval(r);
                sum +=
                    0.5 * (hi - lo) * wt * (2.0 * mu * (du - u / r).powi(2) + pot.value(r) * u * u);
            }
        }
        assert_relative_eq!(sum, s.energy_integral(3.0).unwrap(), max_relative = 1e-8);
    }

    #[test]
    fn minimizer_zero_potential() {
        let m = radial_form_minimize(
            &RadialPotential::zero(),
            1.0,
            3.0,
            3.0,
            &GridSpec::with_steps(200),
        )
        .unwrap();
        assert!(m.value.abs() < 1e-10, "value {}", m.value);
        for (r, u) in m.grid.iter().zip(&m.u) {
            assert!((u - r).abs() < 1e-10);
        }
    }

    #[test]
    fn minimizer_hard_core_value() {
        // u = (r - 1) on [1, 4]: ∫ 1/r² = 3/4, the exact minimum μ a u(R)² / (R (R - a))
        let m = radial_form_minimize(
            &RadialPotential::hard_core(1.0).unwrap(),
            1.0,
            4.0,
            3.0,
            &GridSpec::with_steps(200),
        )
        .unwrap();
        assert_relative_eq!(m.value, 0.75, max_relative = 1e-9);
        // lower bound used by the soft-potential lemma: μ a u(R)²/R² = 9/16
        assert!(m.value >= 9.0 / 16.0);
    }

    #[test]
    fn minimizer_matches_ode() {
        let (mu, r) = (0.5, 8.0);
        let pot = RadialPotential::square_well(4.0, 1.0).unwrap();
        let sol = solve_zero_energy(&pot, mu, &GridSpec::default()).unwrap();
        let m = radial_form_minimize(&pot, mu, r, r - sol.a, &GridSpec::default()).unwrap();
        let sup = m
            .grid
            .iter()
            .zip(&m.u)
            .map(|(x, u)| (sol.eval(*x).0 - u).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-4, "sup-norm {sup}");
        // value of the reduced functional: half of the energy integral
        assert_relative_eq!(
            m.value,
            0.5 * sol.energy_integral(r).unwrap(),
            max_relative = 1e-5
        );
        assert_relative_eq!(m.value, mu * sol.a * (r - sol.a) / r, max_relative = 1e-5);
    }

    #[test]
    fn minimizer_rejects_bad_input() {
        let pot = RadialPotential::square_well(4.0, 1.0).unwrap();
        assert!(radial_form_minimize(&pot, 0.5, 0.5, 1.0, &GridSpec::default()).is_err());
        assert!(radial_form_minimize(&pot, 0.5, 2.0, 0.0, &GridSpec::default()).is_err());
        let coarse = GridSpec {
            steps_per_range: 2,
            max_kappa_step: f64::INFINITY,
            fem_tolerance: 1e-9,
            ..GridSpec::default()
        };
        assert!(matches!(
            radial_form_minimize(&pot, 0.5, 2.0, 1.0, &coarse),
            Err(Error::NoConvergence(_))
        ));
    }

    #[test]
    fn rejects_nonpositive_mu() {
        assert!(solve_zero_energy(&RadialPotential::zero(), 0.0, &GridSpec::default()).is_err());
    }

    #[test]
    fn hermite_interpolation_is_accurate() {
        let (v0, mu) = (4.0, 0.5);
        let pot = RadialPotential::square_well(v0, 1.0).unwrap();
        let s = solve_zero_energy(&pot, mu, &GridSpec::default()).unwrap();
        let k = (v0 / (2.0 * mu)).sqrt();
        // interior u = sinh(κr) / (κ cosh κ)
        for r in [0.1234, 0.5, 0.777, 0.999] {
            let exact = (k * r).sinh() / (k * k.cosh());
            assert_relative_eq!(s.eval(r).0, exact, max_relative = 1e-9);
        }
    }
}
