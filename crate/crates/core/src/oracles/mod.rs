//! Independent checks of the analytic ingredients: brute force, dense
//! linear algebra and Monte Carlo.

mod dyson;
mod identity;
mod suite;
mod temple;
mod trial;
mod wr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lower_bound::BoxGeometry;

pub use dyson::{
    dyson_equality_margin, dyson_lemma_check, random_dyson_suite, DysonSuite, TrialProfile,
};
pub use identity::{energy_identity_sweep, IdentityRow};
pub use suite::{run_suite, CheckResult, SuiteReport};
pub use temple::{temple_toy_check, temple_two_level, TempleReport};
pub use trial::{trial_energy_mc, TrialEstimate};
pub use wr::{mc_expectation_wr, pair_distance_cdf, wr_pair_mean};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    /// samples (or sweeps) per chain after burn-in
    pub n_samples: usize,
    pub burn_in: usize,
    /// initial single-particle displacement
    pub step_size: f64,
    pub boundary: BoxGeometry,
    /// independent chains, merged in index order
    pub chains: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n_samples: 100_000,
            burn_in: 10_000,
            step_size: 1.0,
            boundary: BoxGeometry::Free,
            chains: 4,
        }
    }
}

impl McConfig {
    pub fn check(&self) -> Result<()> {
        if self.n_samples == 0 {
            return invalid("n_samples must be positive");
        }
        if self.chains == 0 {
            return invalid("need at least one chain");
        }
        if !(self.step_size > 0.0) {
            return invalid(format!(
                "step size must be positive, got {}",
                self.step_size
            ));
        }
        Ok(())
    }

    /// Generator of chain `i`: the master seed with stream `i`.
    pub(crate) fn rng(&self, chain: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(chain as u64);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub mean: f64,
    /// standard error
    pub sigma: f64,
    pub n_effective: f64,
}

impl EstimateWithError {
    /// `|mean - target| <= k σ`
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.sigma
    }

    /// Equal-weight combination of independent estimates, in slice order.
    pub fn merge(parts: &[EstimateWithError]) -> EstimateWithError {
        let m = parts.len() as f64;
        let mean = parts.iter().map(|p| p.mean).sum::<f64>() / m;
        let var = parts.iter().map(|p| p.sigma * p.sigma).sum::<f64>() / (m * m);
        EstimateWithError {
            mean,
            sigma: var.sqrt(),
            n_effective: parts.iter().map(|p| p.n_effective).sum(),
        }
    }
}

/// Streaming batch-means accumulator: `batches` equal batches over a known
/// number of samples, so correlated chains get an honest error bar.
pub(crate) struct BatchMeans {
    batch_len: usize,
    current: f64,
    filled: usize,
    batch_sums: Vec<f64>,
    sum: f64,
    sum_sq: f64,
    count: usize,
}

impl BatchMeans {
    pub fn new(total: usize, batches: usize) -> Self {
        let batches = batches.clamp(1, total.max(1));
        Self {
            batch_len: (total / batches).max(1),
            current: 0.0,
            filled: 0,
            batch_sums: Vec::with_capacity(batches + 1),
            sum: 0.0,
            sum_sq: 0.0,
            count: 0,
        }
    }

    pub fn push(&mut self, x: f64) {
        self.current += x;
        self.filled += 1;
        self.sum += x;
        self.sum_sq += x * x;
        self.count += 1;
        if self.filled == self.batch_len {
            self.batch_sums.push(self.current / self.batch_len as f64);
            self.current = 0.0;
            self.filled = 0;
        }
    }

    pub fn finish(&self) -> EstimateWithError {
        let n = self.count as f64;
        let mean = self.sum / n;
        let naive_var = (self.sum_sq / n - mean * mean).max(0.0);
        let b = self.batch_sums.len();
        if b < 2 {
            return EstimateWithError {
                mean,
                sigma: (naive_var / n).sqrt(),
                n_effective: n,
            };
        }
        let bm = self.batch_sums.iter().sum::<f64>() / b as f64;
        let var_b = self
            .batch_sums
            .iter()
            .map(|x| (x - bm).powi(2))
            .sum::<f64>()
            / (b as f64 - 1.0);
        let sigma = (var_b / b as f64).sqrt();
        let n_effective = if sigma > 0.0 {
            (naive_var / (sigma * sigma)).min(n)
        } else {
            n
        };
        EstimateWithError {
            mean,
            sigma,
            n_effective,
        }
    }
}
