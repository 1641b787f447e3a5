//! Nonnegative, spherically symmetric pair potentials.
//!
//! A hard core is carried as a boundary condition (the radial solution
//! vanishes at the core radius) and is never evaluated as a number.
//! Power tails `C / r^n` with `n > 3` may be attached beyond a radius `R0`
//! and optionally truncated to make the potential finite range.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative size of the discarded tail Born integral used to pick the
/// default truncation radius of an infinite power tail.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// One constant shell `(previous outer, outer]` of a piecewise-constant potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub outer: f64,
    pub height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    HardCore,
    SquareWell,
    Shells,
    Tabulated,
    PowerTail,
}

impl PotentialKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PotentialKind::HardCore => "hard-core",
            PotentialKind::SquareWell => "square-well",
            PotentialKind::Shells => "shells",
            PotentialKind::Tabulated => "tabulated",
            PotentialKind::PowerTail => "power-tail",
        }
    }
}

impl FromStr for PotentialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "hard-core" | "hardcore" => PotentialKind::HardCore,
            "square-well" | "square" => PotentialKind::SquareWell,
            "shells" => PotentialKind::Shells,
            "tabulated" | "table" => PotentialKind::Tabulated,
            "power-tail" => PotentialKind::PowerTail,
            other => return Err(Error::InvalidPotential(format!("unknown kind '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Shape {
    HardCore {
        radius: f64,
    },
    SquareWell {
        height: f64,
        radius: f64,
    },
    Shells {
        shells: Vec<Shell>,
    },
    Tabulated {
        points: Vec<(f64, f64)>,
    },
    PowerTail {
        inner: Box<RadialPotential>,
        radius: f64,
        strength: f64,
        exponent: f64,
        cutoff: Option<f64>,
    },
}

/// A radial pair potential `v(r) >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialPotential {
    shape: Shape,
}

fn check_length(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPotential(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

fn check_height(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPotential(format!(
            "{name} must be nonnegative and finite, got {x}"
        )))
    }
}

impl RadialPotential {
    pub fn hard_core(radius: f64) -> Result<Self> {
        check_length("hard-core radius", radius)?;
        Ok(Self {
            shape: Shape::HardCore { radius },
        })
    }

    pub fn square_well(height: f64, radius: f64) -> Result<Self> {
        check_height("square-well height", height)?;
        check_length("square-well radius", radius)?;
        Ok(Self {
            shape: Shape::SquareWell { height, radius },
        })
    }

    /// `v ≡ 0`, represented as a zero-height well of unit radius.
    pub fn zero() -> Self {
        Self {
            shape: Shape::SquareWell {
                height: 0.0,
                radius: 1.0,
            },
        }
    }

    pub fn shells(shells: Vec<Shell>) -> Result<Self> {
        if shells.is_empty() {
            return Err(Error::InvalidPotential("shell list is empty".into()));
        }
        let mut prev = 0.0;
        for s in &shells {
            check_length("shell radius", s.outer)?;
            check_height("shell height", s.height)?;
            if s.outer <= prev {
                return Err(Error::InvalidPotential("shell radii must increase".into()));
            }
            prev = s.outer;
        }
        Ok(Self {
            shape: Shape::Shells { shells },
        })
    }

    /// Linear interpolation between `(r, v)` nodes, constant below the first
    /// node and zero beyond the last one.
    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPotential(
                "table needs at least two points".into(),
            ));
        }
        let mut prev = -1.0;
        for &(r, v) in &points {
            if !(r.is_finite() && r >= 0.0) || r <= prev {
                return Err(Error::InvalidPotential(
                    "table radii must be >= 0 and increasing".into(),
                ));
            }
            check_height("table value", v)?;
            prev = r;
        }
        if points.last().map(|p| p.0) == Some(0.0) {
            return Err(Error::InvalidPotential(
                "table must extend beyond r = 0".into(),
            ));
        }
        Ok(Self {
            shape: Shape::Tabulated { points },
        })
    }

    /// `inner` on `[0, radius]`, `strength / r^exponent` beyond.
    pub fn power_tail(
        inner: RadialPotential,
        radius: f64,
        strength: f64,
        exponent: f64,
    ) -> Result<Self> {
        check_length("tail radius", radius)?;
        check_height("tail strength", strength)?;
        if !(exponent.is_finite() && exponent > 3.0) {
            return Err(Error::InvalidPotential(format!(
                "tail exponent must exceed 3 (got {exponent}); slower decay gives an infinite scattering length"
            )));
        }
        if !inner.is_finite_range() {
            return Err(Error::InvalidPotential(
                "tail wrapper needs a finite-range inner potential".into(),
            ));
        }
        if inner.range() > radius {
            return Err(Error::InvalidPotential(format!(
                "inner range {} exceeds tail radius {radius}",
                inner.range()
            )));
        }
        Ok(Self {
            shape: Shape::PowerTail {
                inner: Box::new(inner),
                radius,
                strength,
                exponent,
                cutoff: None,
            },
        })
    }

    pub fn kind(&self) -> PotentialKind {
        match &self.shape {
            Shape::HardCore { .. } => PotentialKind::HardCore,
            Shape::SquareWell { .. } => PotentialKind::SquareWell,
            Shape::Shells { .. } => PotentialKind::Shells,
            Shape::Tabulated { .. } => PotentialKind::Tabulated,
            Shape::PowerTail { .. } => PotentialKind::PowerTail,
        }
    }

    /// Radius of the hard core, if any (including one inside a tail wrapper).
    pub fn hard_core_radius(&self) -> Option<f64> {
        match &self.shape {
            Shape::HardCore { radius } => Some(*radius),
            Shape::PowerTail { inner, .. } => inner.hard_core_radius(),
            _ => None,
        }
    }

    /// `R0`: the range for finite-range kinds, the radius where the tail
    /// starts for power-tail kinds.
    pub fn core_radius(&self) -> f64 {
        match &self.shape {
            Shape::PowerTail { radius, .. } => *radius,
            _ => self.range(),
        }
    }

    /// Radius beyond which `v` vanishes identically (infinite for an
    /// untruncated tail).
    pub fn range(&self) -> f64 {
        match &self.shape {
            Shape::HardCore { radius } => *radius,
            Shape::SquareWell { radius, .. } => *radius,
            Shape::Shells { shells } => shells.last().map(|s| s.outer).unwrap_or(0.0),
            Shape::Tabulated { points } => points.last().map(|p| p.0).unwrap_or(0.0),
            Shape::PowerTail { cutoff, .. } => cutoff.unwrap_or(f64::INFINITY),
        }
    }

    pub fn is_finite_range(&self) -> bool {
        self.range().is_finite()
    }

    /// `(strength, exponent)` of an attached tail.
    pub fn tail(&self) -> Option<(f64, f64)> {
        match &self.shape {
            Shape::PowerTail {
                strength, exponent, ..
            } => Some((*strength, *exponent)),
            _ => None,
        }
    }

    pub fn tail_exponent(&self) -> Option<f64> {
        self.tail().map(|t| t.1)
    }

    /// Short identifier used as provenance in solutions and reports.
    pub fn label(&self) -> String {
        match &self.shape {
            Shape::HardCore { radius } => format!("hard-core(R0={radius})"),
            Shape::SquareWell { height, radius } => format!("square-well(V0={height},R0={radius})"),
            Shape::Shells { shells } => format!("shells(n={},R0={})", shells.len(), self.range()),
            Shape::Tabulated { points } => {
                format!("tabulated(n={},R0={})", points.len(), self.range())
            }
            Shape::PowerTail {
                inner,
                radius,
                strength,
                exponent,
                cutoff,
            } => match cutoff {
                Some(c) => format!(
                    "{}+tail(C={strength},n={exponent},R0={radius},cut={c})",
                    inner.label()
                ),
                None => format!(
                    "{}+tail(C={strength},n={exponent},R0={radius})",
                    inner.label()
                ),
            },
        }
    }

    /// `v(r)`. Errors for `r <= 0` and inside a hard core.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        if let Some(core) = self.hard_core_radius() {
            if r <= core {
                return Err(Error::InsideHardCore { r, core });
            }
        }
        Ok(self.value(r))
    }

    /// Unchecked evaluation for the integrators: extends continuously to
    /// `r = 0` and returns 0 inside a hard core (the region never carries
    /// wave function there).
    pub(crate) fn value(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::HardCore { .. } => 0.0,
            Shape::SquareWell { height, radius } => {
                if r <= *radius {
                    *height
                } else {
                    0.0
                }
            }
            Shape::Shells { shells } => shells
                .iter()
                .find(|s| r <= s.outer)
                .map(|s| s.height)
                .unwrap_or(0.0),
            Shape::Tabulated { points } => {
                let (r0, v0) = points[0];
                if r <= r0 {
                    return v0;
                }
                let last = points[points.len() - 1];
                if r > last.0 {
                    return 0.0;
                }
                let i = points.partition_point(|p| p.0 < r);
                let (ra, va) = points[i - 1];
                let (rb, vb) = points[i];
                va + (vb - va) * (r - ra) / (rb - ra)
            }
            Shape::PowerTail {
                inner,
                radius,
                strength,
                exponent,
                cutoff,
            } => {
                if r <= *radius {
                    inner.value(r)
                } else if cutoff.is_some_and(|c| r > c) {
                    0.0
                } else {
                    strength * r.powf(-exponent)
                }
            }
        }
    }

    /// Points in `(0, range]` where `v` or its derivative may jump. The
    /// radial integrators align their steps to these.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = match &self.shape {
            Shape::HardCore { radius } => vec![*radius],
            Shape::SquareWell { radius, .. } => vec![*radius],
            Shape::Shells { shells } => shells.iter().map(|s| s.outer).collect(),
            Shape::Tabulated { points } => {
                points.iter().map(|p| p.0).filter(|&r| r > 0.0).collect()
            }
            Shape::PowerTail {
                inner,
                radius,
                cutoff,
                ..
            } => {
                let mut p = inner.breakpoints();
                p.push(*radius);
                if let Some(c) = cutoff {
                    p.push(*c);
                }
                p
            }
        };
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup();
        pts
    }

    /// Finite-range copy equal to `self` on `[0, cutoff]` and zero beyond.
    pub fn truncate(&self, cutoff: f64) -> Result<Self> {
        if !(cutoff > self.core_radius()) || !cutoff.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "truncation radius {cutoff} must exceed R0 = {}",
                self.core_radius()
            )));
        }
        match &self.shape {
            Shape::PowerTail {
                inner,
                radius,
                strength,
                exponent,
                cutoff: old,
            } => Ok(Self {
                shape: Shape::PowerTail {
                    inner: inner.clone(),
                    radius: *radius,
                    strength: *strength,
                    exponent: *exponent,
                    cutoff: Some(old.map_or(cutoff, |c| c.min(cutoff))),
                },
            }),
            _ => Ok(self.clone()),
        }
    }

    /// `4π ∫_from^range v r² dr` over the tail part only.
    pub fn tail_born_integral(&self, from: f64) -> f64 {
        match &self.shape {
            Shape::PowerTail {
                radius,
                strength,
                exponent,
                cutoff,
                ..
            } => {
                let lo = from.max(*radius);
                let hi = cutoff.unwrap_or(f64::INFINITY);
                if hi <= lo {
                    return 0.0;
                }
                let p = 3.0 - exponent;
                let hi_term = if hi.is_finite() { hi.powf(p) } else { 0.0 };
                4.0 * PI * strength * (lo.powf(p) - hi_term) / (exponent - 3.0)
            }
            _ => 0.0,
        }
    }

    /// `∫ v(|x|) d³x = 4π ∫ v r² dr`.
    pub fn born_integral(&self) -> Result<f64> {
        if self.hard_core_radius().is_some() {
            return Err(Error::Divergent("Born integral of a hard core"));
        }
        Ok(match &self.shape {
            Shape::HardCore { .. } => unreachable!(),
            Shape::SquareWell { height, radius } => 4.0 * PI * height * radius.powi(3) / 3.0,
            Shape::Shells { shells } => {
                let mut prev = 0.0_f64;
                let mut sum = 0.0;
                for s in shells {
                    sum += s.height * (s.outer.powi(3) - prev.powi(3));
                    prev = s.outer;
                }
                4.0 * PI * sum / 3.0
            }
            Shape::Tabulated { points } => {
                let (r0, v0) = points[0];
                let mut sum = v0 * r0.powi(3) / 3.0;
                for w in points.windows(2) {
                    let ((ra, va), (rb, vb)) = (w[0], w[1]);
                    let s = (vb - va) / (rb - ra);
                    // ∫ (va + s (r - ra)) r² dr
                    let c = va - s * ra;
                    sum +=
                        c * (rb.powi(3) - ra.powi(3)) / 3.0 + s * (rb.powi(4) - ra.powi(4)) / 4.0;
                }
                4.0 * PI * sum
            }
            Shape::PowerTail { inner, radius, .. } => {
                inner.born_integral()? + self.tail_born_integral(*radius)
            }
        })
    }

    /// Truncation radius for an infinite tail: the smallest `c` with
    /// `4π∫_c^∞ v r² dr < TAIL_TOLERANCE · (reference)`, where the reference
    /// is the Born integral of the truncated potential, or `8πμ·R_core` when
    /// a hard core makes the Born integral infinite.
    pub fn default_cutoff(&self, mu: f64) -> Option<f64> {
        let Shape::PowerTail {
            inner,
            radius,
            strength,
            exponent,
            cutoff,
        } = &self.shape
        else {
            return None;
        };
        if cutoff.is_some() {
            return *cutoff;
        }
        if *strength == 0.0 {
            return Some(radius * (1.0 + 1e-12));
        }
        let n = *exponent;
        let tail_from = |c: f64| 4.0 * PI * strength * c.powf(3.0 - n) / (n - 3.0);
        let reference = |c: f64| match inner.hard_core_radius() {
            Some(core) => 8.0 * PI * mu * core,
            None => {
                inner.born_integral().unwrap_or(0.0) + self.tail_born_integral(*radius)
                    - tail_from(c)
            }
        };
        // The reference only grows with c, so a fixed-point pass from the
        // full-tail reference converges in a couple of steps.
        let mut c = *radius;
        for _ in 0..8 {
            let target = TAIL_TOLERANCE * reference(c).max(f64::MIN_POSITIVE);
            let next = (4.0 * PI * strength / ((n - 3.0) * target))
                .powf(1.0 / (n - 3.0))
                .max(*radius * 2.0);
            if (next - c).abs() <= 1e-12 * next {
                c = next;
                break;
            }
            c = next;
        }
        Some(c)
    }

    /// Returns a finite-range version (truncating an infinite tail at the
    /// default cutoff).
    pub fn finite_range(&self, mu: f64) -> Result<Self> {
        if self.is_finite_range() {
            return Ok(self.clone());
        }
        let c = self
            .default_cutoff(mu)
            .expect("infinite range implies a tail");
        self.truncate(c)
    }

    /// Serializes to the key-value config format accepted by `FromStr`.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        self.write_config(&mut out, "");
        out
    }

    fn write_config(&self, out: &mut String, prefix: &str) {
        use std::fmt::Write;
        let kind_key = if prefix.is_empty() { "kind" } else { "inner" };
        let _ = writeln!(out, "{kind_key} = {}", self.kind().as_str());
        match &self.shape {
            Shape::HardCore { radius } => {
                let _ = writeln!(out, "{prefix}R0 = {radius}");
            }
            Shape::SquareWell { height, radius } => {
                let _ = writeln!(out, "{prefix}R0 = {radius}");
                let _ = writeln!(out, "V0 = {height}");
            }
            Shape::Shells { shells } => {
                for s in shells {
                    let _ = writeln!(out, "shell = {} {}", s.outer, s.height);
                }
            }
            Shape::Tabulated { points } => {
                for (r, v) in points {
                    let _ = writeln!(out, "point = {r} {v}");
                }
            }
            Shape::PowerTail {
                inner,
                radius,
                strength,
                exponent,
                cutoff,
            } => {
                let _ = writeln!(out, "R0 = {radius}");
                let _ = writeln!(out, "C = {strength}");
                let _ = writeln!(out, "tail_exponent = {exponent}");
                if let Some(c) = cutoff {
                    let _ = writeln!(out, "cutoff = {c}");
                }
                inner.write_config(out, "inner_");
            }
        }
    }
}

impl fmt::Display for RadialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Default)]
struct RawConfig {
    kind: Option<(usize, String)>,
    inner: Option<(usize, String)>,
    r0: Option<f64>,
    inner_r0: Option<f64>,
    v0: Option<f64>,
    c: Option<f64>,
    tail_exponent: Option<f64>,
    cutoff: Option<f64>,
    shells: Vec<Shell>,
    points: Vec<(f64, f64)>,
}

fn parse_num(line: usize, s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        msg: format!("not a number: '{}'", s.trim()),
    })
}

fn parse_pair(line: usize, s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|p| !p.is_empty())
        .collect();
    if parts.len() != 2 {
        return Err(Error::Parse {
            line,
            msg: format!("expected two numbers, got '{}'", s.trim()),
        });
    }
    Ok((parse_num(line, parts[0])?, parse_num(line, parts[1])?))
}

fn build_simple(
    kind: PotentialKind,
    r0: Option<f64>,
    raw: &RawConfig,
    line: usize,
) -> Result<RadialPotential> {
    let need_r0 = || {
        r0.ok_or(Error::Parse {
            line,
            msg: format!("{} needs R0", kind.as_str()),
        })
    };
    match kind {
        PotentialKind::HardCore => RadialPotential::hard_core(need_r0()?),
        PotentialKind::SquareWell => RadialPotential::square_well(
            raw.v0.ok_or(Error::Parse {
                line,
                msg: "square-well needs V0".into(),
            })?,
            need_r0()?,
        ),
        PotentialKind::Shells => RadialPotential::shells(raw.shells.clone()),
        PotentialKind::Tabulated => RadialPotential::tabulated(raw.points.clone()),
        PotentialKind::PowerTail => Err(Error::Parse {
            line,
            msg: "nested power tails are not supported".into(),
        }),
    }
}

/// Key-value format, one `key = value` per line, `#` starts a comment.
///
/// ```text
/// kind = square-well        # hard-core | square-well | shells | tabulated | power-tail
/// R0 = 1.0
/// V0 = 4.0
/// shell = <outer> <height>  # repeated, kind = shells
/// point = <r> <v>           # repeated, kind = tabulated
/// C = 1.0                   # power-tail strength, tail is C / r^tail_exponent beyond R0
/// tail_exponent = 4
/// cutoff = 50               # optional truncation radius
/// inner = none              # power-tail inner potential kind (or none)
/// inner_R0 = 0.5
/// ```
impl FromStr for RadialPotential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (idx, line) in s.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected 'key = value', got '{line}'"),
                });
            };
            let value = value.trim();
            match key.trim() {
                "kind" => raw.kind = Some((lineno, value.to_string())),
                "inner" => raw.inner = Some((lineno, value.to_string())),
                "R0" | "r0" => raw.r0 = Some(parse_num(lineno, value)?),
                "inner_R0" | "inner_r0" => raw.inner_r0 = Some(parse_num(lineno, value)?),
                "V0" | "v0" => raw.v0 = Some(parse_num(lineno, value)?),
                "C" | "c" => raw.c = Some(parse_num(lineno, value)?),
                "tail_exponent" => raw.tail_exponent = Some(parse_num(lineno, value)?),
                "cutoff" => raw.cutoff = Some(parse_num(lineno, value)?),
                "shell" => {
                    let (outer, height) = parse_pair(lineno, value)?;
                    raw.shells.push(Shell { outer, height });
                }
                "point" => raw.points.push(parse_pair(lineno, value)?),
                other => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("unknown key '{other}'"),
                    })
                }
            }
        }
        let (kline, kind) = raw.kind.clone().ok_or(Error::Parse {
            line: 0,
            msg: "missing 'kind'".into(),
        })?;
        let kind: PotentialKind = kind.parse().map_err(|e: Error| Error::Parse {
            line: kline,
            msg: e.to_string(),
        })?;
        if kind != PotentialKind::PowerTail {
            return build_simple(kind, raw.r0, &raw, kline);
        }
        let radius = raw.r0.ok_or(Error::Parse {
            line: kline,
            msg: "power-tail needs R0".into(),
        })?;
        let strength = raw.c.ok_or(Error::Parse {
            line: kline,
            msg: "power-tail needs C".into(),
        })?;
        let exponent = raw.tail_exponent.ok_or(Error::Parse {
            line: kline,
            msg: "power-tail needs tail_exponent".into(),
        })?;
        let inner = match &raw.inner {
            None => RadialPotential::square_well(0.0, radius)?,
            Some((_, k)) if k == "none" => RadialPotential::square_well(0.0, radius)?,
            Some((iline, k)) => {
                let ik: PotentialKind = k.parse().map_err(|e: Error| Error::Parse {
                    line: *iline,
                    msg: e.to_string(),
                })?;
                build_simple(ik, raw.inner_r0, &raw, *iline)?
            }
        };
        let pot = RadialPotential::power_tail(inner, radius, strength, exponent)?;
        match raw.cutoff {
            Some(c) => pot.truncate(c),
            None => Ok(pot),
        }
    }
}
