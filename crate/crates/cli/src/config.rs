//! Run configuration: command-line flags merged over an optional key-value file.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use dilute_bose::lower_bound::Strategy;
use dilute_bose::RadialPotential;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Keys the CLI takes out of the potential file before the rest is parsed as
/// a potential.
const RUN_KEYS: [&str; 5] = ["mu", "seed", "Y_min", "Y_max", "points"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct Common {
    /// Key-value potential file (`kind`, `R0`, `V0`, ...); may also set `mu`,
    /// `seed`, `Y_min`, `Y_max`, `points`
    #[arg(long, global = true)]
    pub potential: Option<PathBuf>,
    /// ħ²/2m
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write an SVG log-log plot of the emitted rows
    #[arg(long, global = true)]
    pub plot: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long = "Y-min", global = true)]
    pub y_min: Option<f64>,
    #[arg(long = "Y-max", global = true)]
    pub y_max: Option<f64>,
    #[arg(long, global = true)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Scattering length, Born integral and energy-identity residuals
    Scatlen {
        /// Ball radii for the identity (default 2, 4 and 8 times the range)
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
    },
    /// Upper bounds over the Y grid, or for a finite periodic box with --n/--L
    Upper {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "L")]
        l: Option<f64>,
    },
    /// One lower-bound evaluation
    Lower {
        #[arg(long = "Y")]
        y: f64,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long = "R-over-a")]
        r_over_a: Option<f64>,
        #[arg(long = "ell-over-a")]
        ell_over_a: Option<f64>,
        /// Constants of the power-law ansatz, used when eps/R/ell are absent
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0, 1.0])]
        constants: Vec<f64>,
        /// Finite box particle number (with --L)
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "L")]
        l: Option<f64>,
    },
    /// Optimize the lower-bound parameters at one Y
    Optimize {
        #[arg(long = "Y")]
        y: f64,
        #[arg(long, default_value = "power-law")]
        strategy: String,
        #[arg(long, default_value_t = 600)]
        nm_iters: u64,
    },
    /// Lower, upper and reference ratios over the Y grid
    Sweep {
        #[arg(long, default_value = "power-law")]
        strategy: String,
        #[arg(long, default_value_t = 600)]
        nm_iters: u64,
    },
    /// Cell distribution minimum: closed form against the linear program
    Cells {
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 3.5, 5.0])]
        k: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [4, 8, 16, 32])]
        p: Vec<usize>,
    },
    /// Run the oracle suite
    Verify,
    /// Trial-state energy by Metropolis sampling in a periodic box
    Mc {
        #[arg(long)]
        n: usize,
        #[arg(long = "L")]
        l: f64,
        /// Healing radius of the trial function (default: the Wigner-Seitz radius)
        #[arg(long)]
        b: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 10_000)]
        burn_in: usize,
        #[arg(long, default_value_t = 4)]
        chains: usize,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Scatlen { .. } => "scatlen",
            Command::Upper { .. } => "upper",
            Command::Lower { .. } => "lower",
            Command::Optimize { .. } => "optimize",
            Command::Sweep { .. } => "sweep",
            Command::Cells { .. } => "cells",
            Command::Verify => "verify",
            Command::Mc { .. } => "mc",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Upper { .. } | Command::Sweep { .. } | Command::Cells { .. } => Format::Csv,
            _ => Format::Json,
        }
    }
}

/// Everything a run depends on, echoed into JSON output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    /// potential in the key-value format, `None` for unit hard spheres
    pub potential: Option<String>,
    pub mu: f64,
    pub seed: u64,
    pub y_min: f64,
    pub y_max: f64,
    pub points: usize,
    pub format: Format,
    pub plot: Option<PathBuf>,
}

#[derive(Default)]
struct FileKeys {
    mu: Option<f64>,
    seed: Option<u64>,
    y_min: Option<f64>,
    y_max: Option<f64>,
    points: Option<usize>,
}

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Config(format!("line {line}: bad value '{v}' for {key}")))
}

/// Splits run keys from potential keys; potential lines keep their numbers.
fn split_file(text: &str) -> Result<(FileKeys, String, bool), CliError> {
    let mut keys = FileKeys::default();
    let mut rest = String::new();
    let mut has_potential = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let run_key = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .filter(|(k, _)| RUN_KEYS.contains(k));
        match run_key {
            Some((k, v)) => {
                let n = idx + 1;
                match k {
                    "mu" => keys.mu = Some(parse_value(n, k, v)?),
                    "seed" => keys.seed = Some(parse_value(n, k, v)?),
                    "Y_min" => keys.y_min = Some(parse_value(n, k, v)?),
                    "Y_max" => keys.y_max = Some(parse_value(n, k, v)?),
                    _ => keys.points = Some(parse_value(n, k, v)?),
                }
                rest.push('\n');
            }
            None => {
                has_potential |= !line.is_empty();
                rest.push_str(raw);
                rest.push('\n');
            }
        }
    }
    Ok((keys, rest, has_potential))
}

fn read_file(path: &Path) -> Result<(FileKeys, Option<RadialPotential>), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let (keys, rest, has_potential) = split_file(&text)?;
    let pot = if has_potential {
        Some(
            rest.parse::<RadialPotential>()
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        )
    } else {
        None
    };
    Ok((keys, pot))
}

impl RunConfig {
    pub fn resolve(
        command: Command,
        common: Common,
    ) -> Result<(Self, Option<RadialPotential>), CliError> {
        let (keys, pot) = match &common.potential {
            Some(p) => read_file(p)?,
            None => (FileKeys::default(), None),
        };
        let cfg = RunConfig {
            format: common.format.unwrap_or_else(|| command.default_format()),
            command,
            potential: pot.as_ref().map(|p| p.to_config()),
            mu: common.mu.or(keys.mu).unwrap_or(1.0),
            seed: common.seed.or(keys.seed).unwrap_or(1),
            y_min: common.y_min.or(keys.y_min).unwrap_or(1e-14),
            y_max: common.y_max.or(keys.y_max).unwrap_or(1e-6),
            points: common.points.or(keys.points).unwrap_or(9),
            plot: common.plot,
        };
        if !(cfg.mu > 0.0 && cfg.mu.is_finite()) {
            return Err(CliError::Config(format!(
                "mu must be positive, got {}",
                cfg.mu
            )));
        }
        Ok((cfg, pot))
    }

    /// Log-spaced, strictly increasing, endpoints exact.
    pub fn y_grid(&self) -> Result<Vec<f64>, CliError> {
        let (lo, hi, n) = (self.y_min, self.y_max, self.points);
        if n == 0 {
            return Err(CliError::Config("points must be at least 1".into()));
        }
        if !(lo > 0.0 && hi > 0.0) || !lo.is_finite() || !hi.is_finite() {
            return Err(CliError::Domain(format!(
                "Y range must be positive, got [{lo}, {hi}]"
            )));
        }
        if n == 1 {
            return Ok(vec![lo]);
        }
        if !(lo < hi) {
            return Err(CliError::Config(format!(
                "need Y-min < Y-max for {n} points, got [{lo}, {hi}]"
            )));
        }
        let (a, b) = (lo.log10(), hi.log10());
        let mut ys: Vec<f64> = (0..n)
            .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
            .collect();
        ys[0] = lo;
        ys[n - 1] = hi;
        if ys.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(CliError::Config(
                "Y grid is not strictly increasing at this resolution".into(),
            ));
        }
        Ok(ys)
    }
}

pub fn parse_strategy(s: &str) -> Result<Strategy, CliError> {
    s.parse()
        .map_err(|e: dilute_bose::Error| CliError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_keys_are_split_off() {
        let (keys, rest, has) =
            split_file("mu = 0.5\nkind = hard-core # core\nR0 = 2\npoints = 3\n").unwrap();
        assert_eq!(keys.mu, Some(0.5));
        assert_eq!(keys.points, Some(3));
        assert!(has);
        assert_eq!(rest.lines().count(), 4);
        let pot: RadialPotential = rest.parse().unwrap();
        assert_eq!(pot.hard_core_radius(), Some(2.0));
    }

    #[test]
    fn grid_endpoints_and_order() {
        let (cfg, _) = RunConfig::resolve(Command::Verify, Common::default()).unwrap();
        let ys = cfg.y_grid().unwrap();
        assert_eq!(ys.len(), 9);
        assert_eq!((ys[0], ys[8]), (1e-14, 1e-6));
        assert!(ys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn bad_grids() {
        let common = Common {
            y_min: Some(1e-3),
            y_max: Some(1e-5),
            ..Common::default()
        };
        let (cfg, _) = RunConfig::resolve(Command::Verify, common).unwrap();
        assert!(matches!(cfg.y_grid(), Err(CliError::Config(_))));
        let common = Common {
            y_min: Some(-1.0),
            ..Common::default()
        };
        let (cfg, _) = RunConfig::resolve(Command::Verify, common).unwrap();
        assert!(matches!(cfg.y_grid(), Err(CliError::Domain(_))));
    }
}
