//! Lower bound via Dyson's lemma, Temple's inequality and Neumann cells.
//!
//! Per-cell bounds are written in scaled variables (`x = a/ℓ`,
//! `d = (R³ - R0³)/ℓ³`, `r = R/ℓ`) so that tiny densities neither overflow
//! nor lose the small deficit `1 - ratio` to cancellation.

mod optimize;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::upper_bounds::{BoundKind, BoundResult, InvalidReason};

pub use optimize::{fit_rate, optimize_parameters, Optimized, RateFit, SearchBudget, Strategy};

/// Prefactor `g` in the first excited Neumann energy `E₁⁽⁰⁾ = g ε μ / ℓ²`
/// as written in the K formula.
pub const GAP_PREFACTOR_LITERAL: f64 = PI;

/// The actual first excited Neumann eigenvalue of `-Δ` on a unit cube is `π²`.
pub const GAP_PREFACTOR_NEUMANN: f64 = PI * PI;

/// The exponents that make every error term vanish like `Y^{1/17}`.
pub const ANSATZ_EXPONENTS: [f64; 3] = [1.0 / 17.0, 6.0 / 17.0, 3.0 / 17.0];

/// Normalized step `3/(R³ - R0³)` on `(R0, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftPotential {
    pub r0: f64,
    pub r: f64,
    pub height: f64,
}

impl SoftPotential {
    pub fn new(r0: f64, r: f64) -> Result<Self> {
        if !(r0 >= 0.0 && r > r0 && r.is_finite()) {
            return invalid(format!(
                "soft potential needs R > R0 >= 0, got R0={r0}, R={r}"
            ));
        }
        Ok(Self {
            r0,
            r,
            height: 3.0 / (r.powi(3) - r0.powi(3)),
        })
    }

    pub fn value(&self, t: f64) -> f64 {
        if t > self.r0 && t < self.r {
            self.height
        } else {
            0.0
        }
    }

    /// `R³ - R0³`
    pub fn shell_volume_factor(&self) -> f64 {
        self.r.powi(3) - self.r0.powi(3)
    }
}

/// Shorthand for [`SoftPotential::new`].
pub fn soft_potential(r0: f64, r: f64) -> Result<SoftPotential> {
    SoftPotential::new(r0, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoxGeometry {
    /// Cube `[0, ℓ]³` with no wrap-around.
    Free,
    /// Minimum-image distances on the torus of side `ℓ`.
    Periodic,
}

impl FromStr for BoxGeometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" | "free-in-box" | "neumann" => Ok(BoxGeometry::Free),
            "periodic" => Ok(BoxGeometry::Periodic),
            other => invalid(format!("unknown boundary '{other}'")),
        }
    }
}

pub(crate) fn distance(p: &[f64; 3], q: &[f64; 3], ell: f64, geometry: BoxGeometry) -> f64 {
    let mut s = 0.0;
    for k in 0..3 {
        let mut d = (p[k] - q[k]).abs();
        if geometry == BoxGeometry::Periodic {
            d = d.min(ell - d);
        }
        s += d * d;
    }
    s.sqrt()
}

/// `W = Σᵢ U(tᵢ)`, `tᵢ` the distance from point `i` to its nearest neighbor.
///
/// Only neighbors closer than `R` matter, so points are bucketed into cells
/// of side `≥ R` and each point scans the 27 surrounding cells.
pub fn nearest_neighbor_interaction(
    points: &[[f64; 3]],
    u: &SoftPotential,
    ell: f64,
    geometry: BoxGeometry,
) -> Result<f64> {
    if points.len() < 2 {
        return invalid(format!("need at least two points, got {}", points.len()));
    }
    if !(ell > 0.0) {
        return invalid(format!("box side must be positive, got {ell}"));
    }
    let m = ((ell / u.r).floor() as usize).clamp(1, 64);
    if m < 3 {
        let mut w = 0.0;
        for (i, p) in points.iter().enumerate() {
            let t = points
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| distance(p, q, ell, geometry))
                .fold(f64::INFINITY, f64::min);
            w += u.value(t);
        }
        return Ok(w);
    }
    let side = ell / m as f64;
    let index = |x: f64| ((x / side).floor() as isize).clamp(0, m as isize - 1);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); m * m * m];
    let flat = |i: isize, j: isize, k: isize| (i as usize * m + j as usize) * m + k as usize;
    let coords: Vec<[isize; 3]> = points
        .iter()
        .map(|p| [index(p[0]), index(p[1]), index(p[2])])
        .collect();
    for (n, c) in coords.iter().enumerate() {
        buckets[flat(c[0], c[1], c[2])].push(n);
    }
    let wrap = |v: isize| -> Option<isize> {
        if (0..m as isize).contains(&v) {
            Some(v)
        } else if geometry == BoxGeometry::Periodic {
            Some(v.rem_euclid(m as isize))
        } else {
            None
        }
    };
    let mut w = 0.0;
    for (n, p) in points.iter().enumerate() {
        let c = coords[n];
        let mut t = f64::INFINITY;
        for di in -1..=1 {
            for dj in -1..=1 {
                for dk in -1..=1 {
                    let (Some(i), Some(j), Some(k)) =
                        (wrap(c[0] + di), wrap(c[1] + dj), wrap(c[2] + dk))
                    else {
                        continue;
                    };
                    for &q in &buckets[flat(i, j, k)] {
                        if q != n {
                            t = t.min(distance(p, &points[q], ell, geometry));
                        }
                    }
                }
            }
        }
        w += u.value(t);
    }
    Ok(w)
}

/// Both sides of the first-order bracket for `⟨W_R⟩₀ / n` in a cell of side
/// `ℓ` holding `n` particles.
pub fn first_order_brackets(n: usize, ell: f64, r: f64, r0: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return invalid(format!("need n >= 2, got {n}"));
    }
    if !(ell > 2.0 * r && r > r0 && r0 >= 0.0) {
        return invalid(format!(
            "need ell > 2R and R > R0 >= 0, got ell={ell}, R={r}, R0={r0}"
        ));
    }
    let nf = n as f64;
    let rho = nf / ell.powi(3);
    let high = 4.0 * PI * rho * (1.0 - 1.0 / nf);
    let low = high * (1.0 - 2.0 * r / ell).powi(3) / (1.0 + high * (r.powi(3) - r0.powi(3)) / 3.0);
    Ok((low, high))
}

/// Temple's inequality `E₀ ≥ ⟨H⟩ - (⟨H²⟩ - ⟨H⟩²)/(E₁ - ⟨H⟩)`.
pub fn temple_bound(h_mean: f64, h2_mean: f64, e1_floor: f64) -> Result<f64> {
    if !(e1_floor > h_mean) {
        return Err(Error::TempleGap {
            e1: e1_floor,
            mean: h_mean,
        });
    }
    let var = h2_mean - h_mean * h_mean;
    // tolerate rounding in a zero-variance input
    if var < -1e-12 * h2_mean.abs().max(1.0) {
        return invalid(format!(
            "<H^2> = {h2_mean} is below <H>^2 = {}",
            h_mean * h_mean
        ));
    }
    Ok(h_mean - var.max(0.0) / (e1_floor - h_mean))
}

/// `⟨W²⟩₀ ≤ 3n/(R³ - R0³) · ⟨W⟩₀`, from `U² = 3(R³ - R0³)⁻¹ U` and Cauchy-Schwarz.
pub fn variance_bound(w_mean: f64, n: usize, r: f64, r0: f64) -> f64 {
    3.0 * n as f64 / (r.powi(3) - r0.powi(3)) * w_mean
}

/// Parameters of one lower-bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundParams {
    pub eps: f64,
    /// outer radius of the soft potential
    pub r: f64,
    /// cell side
    pub ell: f64,
    /// range of the pair potential
    pub r0: f64,
    /// `(α, β, γ)` when the parameters come from the power-law ansatz
    pub exponents: Option<[f64; 3]>,
    /// `(c_α, c_β, c_γ)` of the ansatz
    pub constants: Option<[f64; 3]>,
}

impl LowerBoundParams {
    pub fn new(eps: f64, r: f64, ell: f64, r0: f64) -> Self {
        Self {
            eps,
            r,
            ell,
            r0,
            exponents: None,
            constants: None,
        }
    }

    /// `ε = c_α Y^α`, `a/ℓ = c_β Y^β`, `(R³ - R0³)/ℓ³ = c_γ Y^γ`.
    pub fn from_ansatz(y: f64, a: f64, r0: f64, exponents: [f64; 3], constants: [f64; 3]) -> Self {
        let [al, be, ga] = exponents;
        let [ca, cb, cg] = constants;
        let eps = ca * y.powf(al);
        let x = cb * y.powf(be);
        let d = cg * y.powf(ga);
        let ell = a / x;
        let r = ell * (d + (r0 / ell).powi(3)).cbrt();
        Self {
            eps,
            r,
            ell,
            r0,
            exponents: Some(exponents),
            constants: Some(constants),
        }
    }

    /// `0 < ε < 1`, `R > R0`, `ℓ > 2R`.
    pub fn check(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Infeasible(format!(
                "eps = {} outside (0, 1)",
                self.eps
            )));
        }
        if !(self.r > self.r0 && self.r0 >= 0.0) {
            return Err(Error::Infeasible(format!(
                "need R > R0, got R = {}, R0 = {}",
                self.r, self.r0
            )));
        }
        if !(self.ell > 2.0 * self.r) {
            return Err(Error::Infeasible(format!(
                "need ell > 2R, got ell = {}, R = {}",
                self.ell, self.r
            )));
        }
        Ok(())
    }

    pub(crate) fn scaled(&self, a: f64) -> Scaled {
        let d = (self.r.powi(3) - self.r0.powi(3)) / self.ell.powi(3);
        Scaled {
            eps: self.eps,
            x: a / self.ell,
            d,
            r: self.r / self.ell,
        }
    }
}

/// Cell parameters in units of `ℓ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Scaled {
    pub eps: f64,
    /// `a/ℓ`
    pub x: f64,
    /// `(R³ - R0³)/ℓ³`
    pub d: f64,
    /// `R/ℓ`
    pub r: f64,
}

/// Outcome of a K or ratio evaluation: either positive with its deficit
/// `1 - value`, or the trivial fallback with a violation size for search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Eval {
    Positive { ln_value: f64 },
    Fallback { violation: f64 },
}

impl Eval {
    pub fn value(&self) -> f64 {
        match self {
            Eval::Positive { ln_value } => ln_value.exp(),
            Eval::Fallback { .. } => 0.0,
        }
    }

    pub fn deficit(&self) -> f64 {
        match self {
            Eval::Positive { ln_value } => -ln_value.exp_m1(),
            Eval::Fallback { .. } => 1.0,
        }
    }
}

pub(crate) fn k_scaled(n: f64, s: &Scaled, gap: f64) -> Eval {
    let mut violation = 0.0;
    if !(s.eps > 0.0 && s.eps < 1.0) {
        violation += s.eps.max(1.0);
    }
    if !(2.0 * s.r < 1.0) {
        violation += 2.0 * s.r;
    }
    if !(s.d > 0.0 && s.x > 0.0) {
        violation += 1.0;
    }
    let pairs = n * (n - 1.0);
    let denom = gap * s.eps - 4.0 * PI * s.x * pairs;
    let temple = 3.0 * n * s.x / (s.d * denom);
    if !(denom > 0.0) {
        violation += 1.0 + 4.0 * PI * s.x * pairs / (gap * s.eps);
    } else if !(temple < 1.0) {
        violation += temple;
    }
    if violation > 0.0 || !temple.is_finite() {
        return Eval::Fallback {
            violation: violation.max(1.0),
        };
    }
    let middle = 4.0 * PI / 3.0 * (n - 1.0) * s.d;
    let ln_value =
        (-s.eps).ln_1p() + 3.0 * (-2.0 * s.r).ln_1p() - middle.ln_1p() + (-temple).ln_1p();
    Eval::Positive { ln_value }
}

/// `(1 - 1/k) K(⌈4k⌉)` for mean cell occupation `k = ρℓ³`.
pub(crate) fn ratio_scaled(k: f64, s: &Scaled, gap: f64) -> Eval {
    let p = (4.0 * k).ceil().max(2.0);
    let kf = k_scaled(p, s, gap);
    let sparse = if k > 1.0 {
        0.0
    } else {
        1.0 / k.max(f64::MIN_POSITIVE)
    };
    match kf {
        Eval::Positive { ln_value } if sparse == 0.0 => Eval::Positive {
            ln_value: ln_value + (-1.0 / k).ln_1p(),
        },
        Eval::Positive { .. } => Eval::Fallback {
            violation: sparse.max(1.0),
        },
        Eval::Fallback { violation } => Eval::Fallback {
            violation: violation + sparse,
        },
    }
}

/// `K(n, ℓ)` with the gap prefactor as written. `μ` cancels and is not needed.
/// Returns 0 in the fallback region.
pub fn k_factor(n: usize, ell: f64, eps: f64, r: f64, r0: f64, a: f64) -> f64 {
    k_factor_with_gap(n, ell, eps, r, r0, a, GAP_PREFACTOR_LITERAL)
}

pub fn k_factor_with_gap(n: usize, ell: f64, eps: f64, r: f64, r0: f64, a: f64, gap: f64) -> f64 {
    if n < 2 || !(r > r0) {
        return 0.0;
    }
    let s = LowerBoundParams::new(eps, r, ell, r0).scaled(a);
    k_scaled(n as f64, &s, gap).value()
}

fn lower_result(k: f64, params: &LowerBoundParams, a: f64, gap: f64) -> BoundResult {
    let mut out = match params.check() {
        Err(_) => BoundResult::invalid(BoundKind::Lower, InvalidReason::ParameterDomain),
        Ok(()) if !(k > 1.0) => {
            BoundResult::invalid(BoundKind::Lower, InvalidReason::CellTooSparse)
        }
        Ok(()) => {
            let e = ratio_scaled(k, &params.scaled(a), gap);
            let mut r =
                BoundResult::valid(BoundKind::Lower, e.value(), None).with("deficit", e.deficit());
            if let Eval::Fallback { .. } = e {
                r = r.note("K fallback region: trivial bound E0 >= 0");
            }
            r
        }
    };
    out = out
        .with("eps", params.eps)
        .with("R", params.r)
        .with("ell", params.ell)
        .with("R0", params.r0)
        .with("a", a)
        .with("k", k)
        .with("p", (4.0 * k).ceil())
        .with("gap_prefactor", gap);
    if let Some([al, be, ga]) = params.exponents {
        out = out.with("alpha", al).with("beta", be).with("gamma", ga);
    }
    if let Some([ca, cb, cg]) = params.constants {
        out = out
            .with("c_alpha", ca)
            .with("c_beta", cb)
            .with("c_gamma", cg);
    }
    out
}

/// `E₀(N, L)/N ≥ 4πμaρ (1 - 1/(ρℓ³)) K(⌈4ρℓ³⌉, ℓ)`.
pub fn finite_box_lower_bound(
    n: usize,
    l: f64,
    a: f64,
    mu: f64,
    params: &LowerBoundParams,
) -> Result<BoundResult> {
    finite_box_lower_bound_with_gap(n, l, a, mu, params, GAP_PREFACTOR_LITERAL)
}

pub fn finite_box_lower_bound_with_gap(
    n: usize,
    l: f64,
    a: f64,
    mu: f64,
    params: &LowerBoundParams,
    gap: f64,
) -> Result<BoundResult> {
    if n < 2 {
        return invalid(format!("need N >= 2, got {n}"));
    }
    if !(l > 0.0 && a > 0.0 && mu > 0.0) {
        return invalid(format!(
            "L, a and mu must be positive: L={l}, a={a}, mu={mu}"
        ));
    }
    let rho = n as f64 / l.powi(3);
    let k = rho * params.ell.powi(3);
    let mut out = if l < params.ell {
        BoundResult::invalid(BoundKind::Lower, InvalidReason::BoxSmallerThanCell)
    } else {
        lower_result(k, params, a, gap)
    };
    out = out.with("N", n as f64).with("L", l).with("mu", mu);
    if out.valid {
        out.energy_per_particle = Some(4.0 * PI * mu * a * rho * out.ratio);
        let y = 4.0 * PI * rho * a.powi(3) / 3.0;
        out = out.with("Y", y).note(format!(
            "validity window (Y < delta, L/a > C' Y^(-6/17)) not enforced: L/a * Y^(6/17) = {:.3e}",
            l / a * y.powf(6.0 / 17.0)
        ));
    }
    Ok(out)
}

/// Thermodynamic-limit lower ratio at dilution `Y` (the cell bound does not
/// depend on `L`).
pub fn lower_bound_thermo(y: f64, a: f64, params: &LowerBoundParams) -> BoundResult {
    lower_bound_thermo_with_gap(y, a, params, GAP_PREFACTOR_LITERAL)
}

pub fn lower_bound_thermo_with_gap(
    y: f64,
    a: f64,
    params: &LowerBoundParams,
    gap: f64,
) -> BoundResult {
    if !(y > 0.0 && a > 0.0) {
        return BoundResult::invalid(BoundKind::Lower, InvalidReason::NonPositiveInput)
            .with("Y", y);
    }
    if y >= 1.0 {
        return BoundResult::invalid(BoundKind::Lower, InvalidReason::DensityTooHigh).with("Y", y);
    }
    let k = 3.0 * y / (4.0 * PI) * (params.ell / a).powi(3);
    lower_result(k, params, a, gap).with("Y", y)
}

/// The five conditions on `(α, β, γ)` and the exponents they control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentReport<T> {
    pub alpha_positive: bool,
    pub three_beta_minus_one_positive: bool,
    pub one_minus_three_beta_plus_gamma_positive: bool,
    pub one_minus_alpha_two_beta_gamma_positive: bool,
    pub alpha_plus_five_beta_below_two: bool,
    /// `[α, 3β - 1, 1 - 3β + γ, 1 - α - 2β - γ]`
    pub error_exponents: [T; 4],
    /// `γ/3`, the rate of `2R/ℓ`
    pub boundary_exponent: T,
}

impl<T: Copy + PartialEq> ExponentReport<T> {
    pub fn all_pass(&self) -> bool {
        self.alpha_positive
            && self.three_beta_minus_one_positive
            && self.one_minus_three_beta_plus_gamma_positive
            && self.one_minus_alpha_two_beta_gamma_positive
            && self.alpha_plus_five_beta_below_two
    }

    pub fn error_exponents_equal(&self) -> bool {
        self.error_exponents
            .iter()
            .all(|e| *e == self.error_exponents[0])
    }
}

/// Works for `f64` and for exact `Ratio<i64>`.
pub fn exponent_conditions<T: Num + Copy + PartialOrd>(
    alpha: T,
    beta: T,
    gamma: T,
) -> ExponentReport<T> {
    let one = T::one();
    let two = one + one;
    let three = two + one;
    let five = three + two;
    let zero = T::zero();
    let e = [
        alpha,
        three * beta - one,
        one - three * beta + gamma,
        one - alpha - two * beta - gamma,
    ];
    ExponentReport {
        alpha_positive: e[0] > zero,
        three_beta_minus_one_positive: e[1] > zero,
        one_minus_three_beta_plus_gamma_positive: e[2] > zero,
        one_minus_alpha_two_beta_gamma_positive: e[3] > zero,
        alpha_plus_five_beta_below_two: alpha + five * beta < two,
        error_exponents: e,
        boundary_exponent: gamma / three,
    }
}

/// `E₀(n) ≥ max(⌊n/p⌋, n/(2p)) e_p` from superadditivity.
pub fn superadditive_split(n: usize, p: usize, e_p: f64) -> Result<f64> {
    if p == 0 || n < p {
        return invalid(format!("need n >= p >= 1, got n={n}, p={p}"));
    }
    if !(e_p >= 0.0) {
        return invalid(format!("e_p must be nonnegative, got {e_p}"));
    }
    let floor = (n / p) as f64;
    let half = n as f64 / (2.0 * p as f64);
    Ok(floor.max(half) * e_p)
}

impl fmt::Display for LowerBoundParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "eps={:.6e} R={:.6e} ell={:.6e} R0={:.6e}",
            self.eps, self.r, self.ell, self.r0
        )
    }
}
