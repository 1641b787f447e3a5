//! One function per subcommand, each returning a [`Report`].

use dilute_bose::cells::{brute_force_distribution, closed_form_minimum, default_n_max};
use dilute_bose::lower_bound::{
    finite_box_lower_bound, fit_rate, lower_bound_thermo, optimize_parameters, BoxGeometry,
    SearchBudget, ANSATZ_EXPONENTS,
};
use dilute_bose::oracles::{energy_identity_sweep, run_suite, trial_energy_mc, McConfig};
use dilute_bose::upper_bounds::{
    default_dirichlet_constant, dirichlet_correction, dyson_hard_sphere, lhy_expansion,
    upper_bound_finite_range, upper_bound_periodic, upper_bound_thermo,
};
use dilute_bose::{
    solve_zero_energy, BoundResult, FiniteBox, GridSpec, LowerBoundParams, RadialPotential,
    ScatteringSolution,
};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{parse_strategy, Command, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Report, Table, SWEEP_COLUMNS};

use Cell::{Bool, Int, Num, Text};

/// Scattering data the bounds need: `a` and the potential range `R0`.
struct Scales {
    pot: RadialPotential,
    sol: ScatteringSolution,
}

impl Scales {
    /// Unit hard spheres when no potential is given.
    fn new(pot: Option<&RadialPotential>, mu: f64) -> Result<Self, CliError> {
        let pot = match pot {
            Some(p) => p.finite_range(mu)?,
            None => RadialPotential::hard_core(1.0)?,
        };
        let sol = solve_zero_energy(&pot, mu, &GridSpec::default())?;
        Ok(Self { pot, sol })
    }

    fn a(&self) -> f64 {
        self.sol.a
    }

    fn r0(&self) -> f64 {
        self.pot.range().max(self.sol.a)
    }

    fn need_positive_a(&self) -> Result<f64, CliError> {
        if self.a() > 0.0 {
            Ok(self.a())
        } else {
            Err(CliError::Domain(
                "scattering length is zero, the bounds are trivial".into(),
            ))
        }
    }
}

fn dilute(y: f64) -> Result<(), CliError> {
    if y > 0.0 && y < 1.0 {
        Ok(())
    } else {
        Err(CliError::Domain(format!("Y must lie in (0, 1), got {y}")))
    }
}

fn require_valid(b: &BoundResult) -> Result<(), CliError> {
    match (b.valid, b.reason) {
        (true, _) => Ok(()),
        (false, Some(r)) => Err(CliError::Domain(format!(
            "{:?} bound not available: {r}",
            b.kind
        ))),
        (false, None) => Err(CliError::Domain(format!(
            "{:?} bound not available",
            b.kind
        ))),
    }
}

pub fn run(cfg: &RunConfig, pot: Option<&RadialPotential>) -> Result<Report, CliError> {
    match &cfg.command {
        Command::Scatlen { radii } => scatlen(cfg, pot, radii),
        Command::Upper { n, l } => upper(cfg, pot, *n, *l),
        Command::Lower {
            y,
            eps,
            r_over_a,
            ell_over_a,
            constants,
            n,
            l,
        } => {
            let explicit = match (eps, r_over_a, ell_over_a) {
                (Some(e), Some(r), Some(ell)) => Some((*e, *r, *ell)),
                (None, None, None) => None,
                _ => {
                    return Err(CliError::Config(
                        "give all of --eps, --R-over-a, --ell-over-a or none".into(),
                    ))
                }
            };
            lower(cfg, pot, *y, explicit, constants, *n, *l)
        }
        Command::Optimize {
            y,
            strategy,
            nm_iters,
        } => optimize(cfg, pot, *y, strategy, *nm_iters),
        Command::Sweep { strategy, nm_iters } => sweep(cfg, pot, strategy, *nm_iters),
        Command::Cells { k, p } => cells(k, p),
        Command::Verify => verify(cfg),
        Command::Mc {
            n,
            l,
            b,
            samples,
            burn_in,
            chains,
            step,
        } => {
            let mc = McConfig {
                seed: cfg.seed,
                n_samples: *samples,
                burn_in: *burn_in,
                step_size: *step,
                boundary: BoxGeometry::Periodic,
                chains: *chains,
            };
            mc_trial(cfg, pot, *n, *l, *b, &mc)
        }
    }
}

fn scatlen(
    cfg: &RunConfig,
    pot: Option<&RadialPotential>,
    radii: &[f64],
) -> Result<Report, CliError> {
    let pot = pot.ok_or_else(|| CliError::Config("scatlen needs --potential".into()))?;
    let sc = Scales::new(Some(pot), cfg.mu)?;
    let range = sc.pot.range();
    let radii: Vec<f64> = if radii.is_empty() {
        [2.0, 4.0, 8.0]
            .iter()
            .map(|f| f * range.max(sc.a()).max(1e-300))
            .collect()
    } else {
        radii.to_vec()
    };
    let rows = energy_identity_sweep(pot, cfg.mu, &radii)?;
    let born = pot.born_integral().ok();
    let residual = rows.iter().map(|r| r.flux_residual).fold(0.0, f64::max);
    let squared = rows.iter().map(|r| r.residual).fold(0.0, f64::max);

    let mut t = Table::new(&[
        "radius",
        "a",
        "born",
        "lhs",
        "rhs",
        "flux",
        "residual",
        "flux_residual",
    ]);
    for r in &rows {
        t.push(vec![
            Num(r.radius),
            Num(sc.a()),
            Num(born.unwrap_or(f64::NAN)),
            Num(r.lhs),
            Num(r.rhs),
            Num(r.flux),
            Num(r.residual),
            Num(r.flux_residual),
        ]);
    }
    let body = json!({
        "a": sc.a(),
        "born": born,
        "residual": residual,
        "squared_form_residual": squared,
        "range": range,
        "error_estimate": sc.sol.error_estimate,
        "potential": pot.label(),
        "identity": rows,
    });
    Ok(Report::with_body(t, body))
}

fn upper(
    cfg: &RunConfig,
    pot: Option<&RadialPotential>,
    n: Option<usize>,
    l: Option<f64>,
) -> Result<Report, CliError> {
    match (n, l) {
        (Some(n), Some(l)) => {
            let sc = Scales::new(pot, cfg.mu)?;
            let bx = FiniteBox::new(n, l)?;
            let periodic = upper_bound_periodic(&bx, sc.a(), cfg.mu);
            require_valid(&periodic)?;
            let bounds = vec![
                upper_bound_finite_range(&bx, sc.a(), sc.r0(), cfg.mu),
                dirichlet_correction(&periodic, l, default_dirichlet_constant(cfg.mu)),
                periodic,
            ];
            let mut t = Table::new(&["kind", "N", "L", "ratio", "energy_per_particle", "valid"]);
            for b in &bounds {
                t.push(vec![
                    Text(format!("{:?}", b.kind)),
                    Int(n as i64),
                    Num(l),
                    Num(b.ratio),
                    Num(b.energy_per_particle.unwrap_or(f64::NAN)),
                    Bool(b.valid),
                ]);
            }
            Ok(Report::with_body(t, json!({ "bounds": bounds })))
        }
        (None, None) => {
            let ys = cfg.y_grid()?;
            ys.iter().try_for_each(|y| dilute(*y))?;
            let mut t = Table::new(&[
                "Y",
                "ratio_upper",
                "ratio_lhy",
                "ratio_dyson_lower",
                "ratio_dyson_upper",
            ]);
            for &y in &ys {
                let (dl, du) = dyson_hard_sphere(y);
                t.push(vec![
                    Num(y),
                    Num(upper_bound_thermo(y).ratio),
                    Num(lhy_expansion(y).ratio),
                    Num(dl.ratio),
                    Num(du.ratio),
                ]);
            }
            let mut r = Report::new(t);
            r.plot = Some((
                "Y",
                vec![
                    "ratio_upper",
                    "ratio_lhy",
                    "ratio_dyson_lower",
                    "ratio_dyson_upper",
                ],
            ));
            Ok(r)
        }
        _ => Err(CliError::Config("give both --n and --L or neither".into())),
    }
}

fn lower(
    cfg: &RunConfig,
    pot: Option<&RadialPotential>,
    y: f64,
    explicit: Option<(f64, f64, f64)>,
    constants: &[f64],
    n: Option<usize>,
    l: Option<f64>,
) -> Result<Report, CliError> {
    dilute(y)?;
    let sc = Scales::new(pot, cfg.mu)?;
    let a = sc.need_positive_a()?;
    let params = match explicit {
        Some((eps, r, ell)) => LowerBoundParams::new(eps, r * a, ell * a, sc.r0()),
        None => {
            let c: [f64; 3] = constants
                .try_into()
                .map_err(|_| CliError::Config("--constants takes three values".into()))?;
            LowerBoundParams::from_ansatz(y, a, sc.r0(), ANSATZ_EXPONENTS, c)
        }
    };
    let bound = match (n, l) {
        (Some(n), Some(l)) => finite_box_lower_bound(n, l, a, cfg.mu, &params)?,
        (None, None) => lower_bound_thermo(y, a, &params),
        _ => return Err(CliError::Config("give both --n and --L or neither".into())),
    };
    require_valid(&bound)?;
    let mut t = Table::new(&["Y", "ratio_lower", "eps", "R_over_a", "ell_over_a", "valid"]);
    t.push(vec![
        Num(y),
        Num(bound.ratio),
        Num(params.eps),
        Num(params.r / a),
        Num(params.ell / a),
        Bool(bound.valid),
    ]);
    Ok(Report::with_body(
        t,
        json!({ "bound": bound, "params": params, "a": a }),
    ))
}

fn budget(nm_iters: u64) -> SearchBudget {
    SearchBudget {
        nm_iters,
        ..SearchBudget::default()
    }
}

fn optimize(
    cfg: &RunConfig,
    pot: Option<&RadialPotential>,
    y: f64,
    strategy: &str,
    nm_iters: u64,
) -> Result<Report, CliError> {
    dilute(y)?;
    let strategy = parse_strategy(strategy)?;
    let sc = Scales::new(pot, cfg.mu)?;
    let a = sc.need_positive_a()?;
    let opt = optimize_parameters(y, a, sc.r0(), strategy, &budget(nm_iters))?;
    let mut t = Table::new(&[
        "Y",
        "ratio_lower",
        "deficit",
        "eps",
        "R_over_a",
        "ell_over_a",
        "feasible",
        "evaluations",
    ]);
    t.push(vec![
        Num(y),
        Num(opt.ratio),
        Num(opt.deficit),
        Num(opt.params.eps),
        Num(opt.params.r / a),
        Num(opt.params.ell / a),
        Bool(opt.feasible),
        Int(opt.evaluations as i64),
    ]);
    Ok(Report::with_body(t, opt))
}

fn sweep(
    cfg: &RunConfig,
    pot: Option<&RadialPotential>,
    strategy: &str,
    nm_iters: u64,
) -> Result<Report, CliError> {
    let strategy = parse_strategy(strategy)?;
    let ys = cfg.y_grid()?;
    ys.iter().try_for_each(|y| dilute(*y))?;
    let sc = Scales::new(pot, cfg.mu)?;
    let a = sc.need_positive_a()?;
    let b = budget(nm_iters);
    // rows come back in grid order whatever the completion order
    let opts = ys
        .par_iter()
        .map(|&y| optimize_parameters(y, a, sc.r0(), strategy, &b))
        .collect::<Result<Vec<_>, _>>()?;
    let fit_points: Vec<(f64, f64)> = opts
        .iter()
        .filter(|o| o.deficit > 0.0)
        .map(|o| (o.y, o.deficit))
        .collect();
    let (fy, fd): (Vec<f64>, Vec<f64>) = fit_points.into_iter().unzip();
    let fit = fit_rate(&fy, &fd).ok();
    let fitted_c = fit.map_or(f64::NAN, |f| f.c_fixed_slope);

    let mut t = Table::new(&SWEEP_COLUMNS);
    for o in &opts {
        t.push(vec![
            Num(o.y),
            Num(o.ratio),
            Num(upper_bound_thermo(o.y).ratio),
            Num(lhy_expansion(o.y).ratio),
            Num(dyson_hard_sphere(o.y).0.ratio),
            Num(o.params.eps),
            Num(o.params.r / a),
            Num(o.params.ell / a),
            Num(fitted_c),
        ]);
    }
    let mut r = Report::new(t);
    r.body = json!({ "rows": r.table.to_json_rows(), "fit": fit, "a": a, "r0": sc.r0(), "strategy": strategy });
    r.plot = Some((
        "Y",
        vec![
            "ratio_lower",
            "ratio_upper",
            "ratio_lhy",
            "ratio_dyson_lower",
        ],
    ));
    Ok(r)
}

fn cells(ks: &[f64], ps: &[usize]) -> Result<Report, CliError> {
    let mut t = Table::new(&["k", "p", "t", "closed_form", "lp_value"]);
    for &k in ks {
        for &p in ps {
            let (tt, closed) = closed_form_minimum(k, p)?;
            let lp = brute_force_distribution(k, p, default_n_max(k, p))?;
            t.push(vec![Num(k), Int(p as i64), Num(tt), Num(closed), Num(lp)]);
        }
    }
    Ok(Report::new(t))
}

fn verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let suite = run_suite(cfg.seed)?;
    let mut t = Table::new(&["check", "passed", "detail"]);
    for c in &suite.checks {
        t.push(vec![
            Text(c.name.clone()),
            Bool(c.passed),
            Text(c.detail.clone()),
        ]);
    }
    let mut r = Report::with_body(t, &suite);
    if !suite.all_passed {
        let failed: Vec<&str> = suite
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        r.failure = Some(CliError::Oracle(format!(
            "failed checks: {}",
            failed.join(", ")
        )));
    }
    Ok(r)
}

fn mc_trial(
    cfg: &RunConfig,
    pot: Option<&RadialPotential>,
    n: usize,
    l: f64,
    b: Option<f64>,
    mc: &McConfig,
) -> Result<Report, CliError> {
    let sc = Scales::new(pot, cfg.mu)?;
    let bx = FiniteBox::new(n, l)?;
    let b = b.unwrap_or_else(|| bx.b());
    let est = trial_energy_mc(n, l, &sc.pot, b, &sc.sol, mc)?;
    let reference = upper_bound_finite_range(&bx, sc.a(), sc.r0(), cfg.mu);
    let reference_total = reference
        .energy_per_particle
        .map_or(f64::NAN, |e| e * n as f64);
    let mut t = Table::new(&[
        "N",
        "L",
        "b",
        "energy",
        "sigma",
        "kinetic",
        "potential",
        "acceptance",
        "step",
        "tie_events",
        "closed_form_energy",
    ]);
    t.push(vec![
        Int(n as i64),
        Num(l),
        Num(b),
        Num(est.energy.mean),
        Num(est.energy.sigma),
        Num(est.kinetic.mean),
        Num(est.potential.mean),
        Num(est.acceptance),
        Num(est.step_size),
        Int(est.tie_events as i64),
        Num(reference_total),
    ]);
    Ok(Report::with_body(
        t,
        json!({ "estimate": est, "closed_form": reference, "closed_form_energy": reference_total, "b": b }),
    ))
}
