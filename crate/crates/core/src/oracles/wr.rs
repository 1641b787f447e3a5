//! `⟨W_R⟩₀` and `⟨W_R²⟩₀` in the constant state: i.i.d. uniform points.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::lower_bound::{nearest_neighbor_interaction, BoxGeometry, SoftPotential};

use super::{BatchMeans, EstimateWithError, McConfig};

/// Returns estimates of `⟨W⟩₀/n` and `⟨W²⟩₀`; `cfg.n_samples` configurations
/// per chain.
pub fn mc_expectation_wr(
    n: usize,
    ell: f64,
    soft: &SoftPotential,
    cfg: &McConfig,
) -> Result<(EstimateWithError, EstimateWithError)> {
    cfg.check()?;
    if n < 2 {
        return invalid(format!("need n >= 2, got {n}"));
    }
    if !(ell > 0.0) {
        return invalid(format!("cell side must be positive, got {ell}"));
    }
    let per_chain: Vec<Result<(EstimateWithError, EstimateWithError)>> = (0..cfg.chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = cfg.rng(c);
            let mut w1 = BatchMeans::new(cfg.n_samples, 1);
            let mut w2 = BatchMeans::new(cfg.n_samples, 1);
            let mut pts = vec![[0.0; 3]; n];
            for _ in 0..cfg.n_samples {
                for p in pts.iter_mut() {
                    *p = [
                        rng.gen_range(0.0..ell),
                        rng.gen_range(0.0..ell),
                        rng.gen_range(0.0..ell),
                    ];
                }
                let w = nearest_neighbor_interaction(&pts, soft, ell, cfg.boundary)?;
                w1.push(w / n as f64);
                w2.push(w * w);
            }
            Ok((w1.finish(), w2.finish()))
        })
        .collect();
    let mut first = Vec::with_capacity(cfg.chains);
    let mut second = Vec::with_capacity(cfg.chains);
    for r in per_chain {
        let (a, b) = r?;
        first.push(a);
        second.push(b);
    }
    Ok((
        EstimateWithError::merge(&first),
        EstimateWithError::merge(&second),
    ))
}

/// `P(|x - y| ≤ r)` for independent uniform points in the unit cube
/// (`r ≤ 1`) or on the unit torus (`r ≤ 1/2`).
pub fn pair_distance_cdf(r: f64, geometry: BoxGeometry) -> Result<f64> {
    match geometry {
        BoxGeometry::Free if (0.0..=1.0).contains(&r) => Ok(4.0 * PI * r.powi(3) / 3.0
            - 1.5 * PI * r.powi(4)
            + 1.6 * r.powi(5)
            - r.powi(6) / 6.0),
        BoxGeometry::Periodic if (0.0..=0.5).contains(&r) => Ok(4.0 * PI * r.powi(3) / 3.0),
        _ => invalid(format!(
            "closed form not available at r = {r} for {geometry:?}"
        )),
    }
}

/// Exact `⟨W⟩₀` for two particles: each sees the other.
pub fn wr_pair_mean(ell: f64, soft: &SoftPotential, geometry: BoxGeometry) -> Result<f64> {
    let p =
        pair_distance_cdf(soft.r / ell, geometry)? - pair_distance_cdf(soft.r0 / ell, geometry)?;
    Ok(2.0 * soft.height * p)
}
