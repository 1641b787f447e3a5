//! Closed-form upper bounds, Dyson's hard-sphere pair of bounds and the
//! Lee-Huang-Yang reference series. All ratios are relative to `4πμρa`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Homogeneous gas: `μ = ħ²/2m`, density `ρ`, scattering length `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParameters {
    pub mu: f64,
    pub rho: f64,
    pub a: f64,
}

impl GasParameters {
    pub fn new(mu: f64, rho: f64, a: f64) -> Result<Self> {
        if !(mu > 0.0 && rho > 0.0 && a > 0.0)
            || !(mu.is_finite() && rho.is_finite() && a.is_finite())
        {
            return invalid(format!(
                "gas parameters must be positive: mu={mu}, rho={rho}, a={a}"
            ));
        }
        Ok(Self { mu, rho, a })
    }

    /// Density from the dilution parameter `Y = 4πρa³/3`.
    pub fn from_y(mu: f64, y: f64, a: f64) -> Result<Self> {
        Self::new(mu, 3.0 * y / (4.0 * PI * a.powi(3)), a)
    }

    pub fn y(&self) -> f64 {
        4.0 * PI * self.rho * self.a.powi(3) / 3.0
    }

    pub fn rho_a3(&self) -> f64 {
        self.rho * self.a.powi(3)
    }

    /// `ℓ_c = (ρa)^{-1/2}`.
    pub fn healing_length(&self) -> f64 {
        (self.rho * self.a).powf(-0.5)
    }

    pub fn mean_spacing(&self) -> f64 {
        self.rho.powf(-1.0 / 3.0)
    }

    /// `a < ρ^{-1/3} < ℓ_c`.
    pub fn is_scale_ordered(&self) -> bool {
        self.a < self.mean_spacing() && self.mean_spacing() < self.healing_length()
    }

    /// `4πμρa`, the leading-order energy per particle.
    pub fn leading_energy(&self) -> f64 {
        4.0 * PI * self.mu * self.rho * self.a
    }
}

/// `N` particles in a periodic cube of side `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteBox {
    pub n: usize,
    pub l: f64,
}

impl FiniteBox {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 2 {
            return invalid(format!("need at least two particles, got {n}"));
        }
        if !(l > 0.0 && l.is_finite()) {
            return invalid(format!("box side must be positive, got {l}"));
        }
        Ok(Self { n, l })
    }

    /// `ρ₁ = (N - 1)/L³`.
    pub fn rho1(&self) -> f64 {
        (self.n - 1) as f64 / self.l.powi(3)
    }

    /// `b = (4πρ₁/3)^{-1/3}`.
    pub fn b(&self) -> f64 {
        (4.0 * PI * self.rho1() / 3.0).powf(-1.0 / 3.0)
    }

    pub fn rho(&self) -> f64 {
        self.n as f64 / self.l.powi(3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    UpperPeriodic,
    UpperDirichlet,
    UpperThermo,
    UpperFiniteRange,
    Lower,
    DysonLower,
    DysonUpper,
    Lhy,
}

impl BoundKind {
    pub fn is_certified(&self) -> bool {
        !matches!(self, BoundKind::Lhy)
    }
}

/// Machine-readable reason attached to an invalid bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvalidReason {
    /// `b <= a`
    BNotAboveA,
    /// `b <= R0`
    BNotAboveRange,
    /// `Y >= 1` (or `ρa³ >= 1`)
    DensityTooHigh,
    /// `ρℓ³ <= 1`: cells hold at most one particle on average
    CellTooSparse,
    /// box smaller than one cell
    BoxSmallerThanCell,
    /// parameters outside `0 < ε < 1`, `R > R0`, `ℓ > 2R`
    ParameterDomain,
    NonPositiveInput,
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InvalidReason::BNotAboveA => "b <= a",
            InvalidReason::BNotAboveRange => "b <= R0",
            InvalidReason::DensityTooHigh => "Y >= 1",
            InvalidReason::CellTooSparse => "rho ell^3 <= 1",
            InvalidReason::BoxSmallerThanCell => "L < ell",
            InvalidReason::ParameterDomain => "parameters outside 0<eps<1, R>R0, ell>2R",
            InvalidReason::NonPositiveInput => "non-positive input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub kind: BoundKind,
    /// `E/N` when the physical scales are known.
    pub energy_per_particle: Option<f64>,
    /// Bound divided by `4πμρa` (with `ρ₁` for the finite-box upper bounds).
    pub ratio: f64,
    pub valid: bool,
    pub reason: Option<InvalidReason>,
    pub notes: Vec<String>,
    pub params: BTreeMap<String, f64>,
}

impl BoundResult {
    pub(crate) fn valid(kind: BoundKind, ratio: f64, energy: Option<f64>) -> Self {
        Self {
            kind,
            energy_per_particle: energy,
            ratio,
            valid: true,
            reason: None,
            notes: Vec::new(),
            params: BTreeMap::new(),
        }
    }

    pub(crate) fn invalid(kind: BoundKind, reason: InvalidReason) -> Self {
        Self {
            kind,
            energy_per_particle: None,
            ratio: f64::NAN,
            valid: false,
            reason: Some(reason),
            notes: Vec::new(),
            params: BTreeMap::new(),
        }
    }

    pub(crate) fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub(crate) fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }
}

/// Dyson-type trial state with periodic boundary conditions:
/// `4πμρ₁a · [1 - x + x² + x³/2] / (1 - x)⁸`, `x = a/b`.
pub fn upper_bound_periodic(bx: &FiniteBox, a: f64, mu: f64) -> BoundResult {
    let b = bx.b();
    let base = |r: BoundResult| {
        r.with("N", bx.n as f64)
            .with("L", bx.l)
            .with("a", a)
            .with("mu", mu)
            .with("b", b)
    };
    if !(a >= 0.0 && mu > 0.0) {
        return base(BoundResult::invalid(
            BoundKind::UpperPeriodic,
            InvalidReason::NonPositiveInput,
        ));
    }
    if b <= a {
        return base(BoundResult::invalid(
            BoundKind::UpperPeriodic,
            InvalidReason::BNotAboveA,
        ));
    }
    let x = a / b;
    let ratio = (1.0 - x + x * x + 0.5 * x.powi(3)) / (1.0 - x).powi(8);
    let energy = 4.0 * PI * mu * bx.rho1() * a * ratio;
    base(BoundResult::valid(
        BoundKind::UpperPeriodic,
        ratio,
        Some(energy),
    ))
}

/// Improvement for a finite range `R0 < b`:
/// `4πμρ₁a · [1 - x² + x³/2] / (1 - x)⁴`.
pub fn upper_bound_finite_range(bx: &FiniteBox, a: f64, r0: f64, mu: f64) -> BoundResult {
    let b = bx.b();
    let base = |r: BoundResult| {
        r.with("N", bx.n as f64)
            .with("L", bx.l)
            .with("a", a)
            .with("R0", r0)
            .with("mu", mu)
            .with("b", b)
    };
    if !(a >= 0.0 && mu > 0.0 && r0 > 0.0) {
        return base(BoundResult::invalid(
            BoundKind::UpperFiniteRange,
            InvalidReason::NonPositiveInput,
        ));
    }
    if b <= r0 {
        return base(BoundResult::invalid(
            BoundKind::UpperFiniteRange,
            InvalidReason::BNotAboveRange,
        ));
    }
    if b <= a {
        return base(BoundResult::invalid(
            BoundKind::UpperFiniteRange,
            InvalidReason::BNotAboveA,
        ));
    }
    let x = a / b;
    let ratio = (1.0 - x * x + 0.5 * x.powi(3)) / (1.0 - x).powi(4);
    let energy = 4.0 * PI * mu * bx.rho1() * a * ratio;
    base(BoundResult::valid(
        BoundKind::UpperFiniteRange,
        ratio,
        Some(energy),
    ))
}

/// Thermodynamic limit of the periodic bound, `Y^{1/3}` in place of `a/b`.
pub fn upper_bound_thermo(y: f64) -> BoundResult {
    if !(y > 0.0) {
        return BoundResult::invalid(BoundKind::UpperThermo, InvalidReason::NonPositiveInput)
            .with("Y", y);
    }
    if y >= 1.0 {
        return BoundResult::invalid(BoundKind::UpperThermo, InvalidReason::DensityTooHigh)
            .with("Y", y);
    }
    let c = y.cbrt();
    let ratio = (1.0 - c + c * c - 0.5 * y) / (1.0 - c).powi(8);
    BoundResult::valid(BoundKind::UpperThermo, ratio, None).with("Y", y)
}

/// Adds the localization cost `c/L²` per particle of a Dirichlet box.
pub fn dirichlet_correction(bound: &BoundResult, l: f64, c_dirichlet: f64) -> BoundResult {
    let mut out = bound.clone();
    out.kind = BoundKind::UpperDirichlet;
    out.params.insert("L".into(), l);
    out.params.insert("c_dirichlet".into(), c_dirichlet);
    if !(c_dirichlet >= 0.0 && l > 0.0) {
        out.valid = false;
        out.reason = Some(InvalidReason::NonPositiveInput);
        return out;
    }
    let extra = c_dirichlet / (l * l);
    if let Some(e) = out.energy_per_particle {
        let e_new = e + extra;
        if e > 0.0 {
            out.ratio *= e_new / e;
        }
        out.energy_per_particle = Some(e_new);
    } else {
        out.notes.push(format!(
            "additive {extra:e} per particle not reflected in ratio (no energy scale)"
        ));
    }
    out
}

/// Default Dirichlet constant, the single-particle localization scale `μπ²`.
pub fn default_dirichlet_constant(mu: f64) -> f64 {
    mu * PI * PI
}

/// Dyson's hard-sphere bounds: `1/(10√2) ≤ ratio ≤ (1 + 2Y^{1/3})/(1 - Y^{1/3})²`.
pub fn dyson_hard_sphere(y: f64) -> (BoundResult, BoundResult) {
    let lower =
        BoundResult::valid(BoundKind::DysonLower, 1.0 / (10.0 * 2.0_f64.sqrt()), None).with("Y", y);
    let upper = if !(y > 0.0) {
        BoundResult::invalid(BoundKind::DysonUpper, InvalidReason::NonPositiveInput)
    } else if y >= 1.0 {
        BoundResult::invalid(BoundKind::DysonUpper, InvalidReason::DensityTooHigh)
    } else {
        let c = y.cbrt();
        BoundResult::valid(
            BoundKind::DysonUpper,
            (1.0 + 2.0 * c) / (1.0 - c).powi(2),
            None,
        )
    }
    .with("Y", y);
    (lower, upper)
}

pub fn lhy_sqrt_coefficient() -> f64 {
    128.0 / (15.0 * PI.sqrt())
}

pub fn lhy_log_coefficient() -> f64 {
    8.0 * (4.0 * PI / 3.0 - 3.0_f64.sqrt())
}

/// `1 + (128/15√π)(ρa³)^{1/2} + 8(4π/3 - √3)(ρa³)log(ρa³)`. Reference only.
pub fn lhy_expansion(y: f64) -> BoundResult {
    let rho_a3 = 3.0 * y / (4.0 * PI);
    if !(y > 0.0) {
        return BoundResult::invalid(BoundKind::Lhy, InvalidReason::NonPositiveInput).with("Y", y);
    }
    if rho_a3 >= 1.0 {
        return BoundResult::invalid(BoundKind::Lhy, InvalidReason::DensityTooHigh).with("Y", y);
    }
    let t1 = lhy_sqrt_coefficient() * rho_a3.sqrt();
    let t2 = lhy_log_coefficient() * rho_a3 * rho_a3.ln();
    let mut r = BoundResult::valid(BoundKind::Lhy, 1.0 + t1 + t2, None)
        .with("Y", y)
        .with("rho_a3", rho_a3);
    r = r.note("reference expansion, not a certified bound");
    if !(t1 < 1.0 && t2.abs() < t1) {
        r = r.note("series terms not decreasing; outside the asymptotic window");
    }
    r
}
