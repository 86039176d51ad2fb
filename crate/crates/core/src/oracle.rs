//! Monte-Carlo cross-checks of the analytic link formulas.
//!
//! Draws come from the model's own distributional assumptions (Gaussian
//! symbol currents, binomial receptor occupancy), so agreement validates the
//! threshold and error-probability algebra rather than the physics.
//!
//! Trials are split into fixed-size chunks. Chunk `i` uses ChaCha8 seeded
//! with the run seed on stream `i`, so results do not depend on the thread
//! count and are bit-identical for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use rayon::prelude::*;

use crate::link::SymbolStats;

/// Generator name recorded in output metadata.
pub const RNG_NAME: &str = "ChaCha8";

/// Smallest trial count accepted for SEP estimates.
pub const MIN_SEP_TRIALS: u64 = 10_000;

const CHUNK: u64 = 1 << 16;

/// Symbols are always equiprobable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialConfig {
    pub n_trials: u64,
    pub seed: u64,
}

impl TrialConfig {
    pub fn new(n_trials: u64, seed: u64) -> Self {
        Self { n_trials, seed }
    }

    fn chunks(&self) -> Vec<(u64, u64)> {
        let n = self.n_trials.div_ceil(CHUNK);
        (0..n)
            .map(|i| (i, CHUNK.min(self.n_trials - i * CHUNK)))
            .collect()
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Empirical symbol error rate and its binomial standard error.
pub fn simulate_sep(stats: &SymbolStats, trials: &TrialConfig) -> (f64, f64) {
    let normals: Vec<Normal<f64>> = stats
        .mu
        .iter()
        .zip(&stats.sigma2)
        .map(|(&m, &s)| Normal::new(m, s.sqrt()).expect("finite positive variance"))
        .collect();
    let m_ary = stats.mu.len();
    let errors: u64 = trials
        .chunks()
        .into_par_iter()
        .map(|(stream, n)| {
            let mut rng = trials.rng(stream);
            let mut errs = 0u64;
            for _ in 0..n {
                let sym = rng.random_range(0..m_ary);
                let x = normals[sym].sample(&mut rng);
                let decided = stats.thresholds.partition_point(|&t| t <= x);
                errs += u64::from(decided != sym);
            }
            errs
        })
        .sum();
    let n = trials.n_trials as f64;
    let p = errors as f64 / n;
    (p, (p * (1.0 - p) / n).sqrt())
}

/// Sample mean and unbiased sample variance of Binomial(n_r, p_on) draws.
pub fn simulate_binding(n_r: u64, p_on: f64, trials: &TrialConfig) -> (f64, f64) {
    let dist = Binomial::new(n_r, p_on).expect("p_on in [0, 1]");
    // exact integer moments, so the merge order cannot matter
    let (sum, sumsq) = trials
        .chunks()
        .into_par_iter()
        .map(|(stream, n)| {
            let mut rng = trials.rng(stream);
            let mut acc = (0u128, 0u128);
            for _ in 0..n {
                let k = dist.sample(&mut rng) as u128;
                acc.0 += k;
                acc.1 += k * k;
            }
            acc
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = trials.n_trials as u128;
    let mean = sum as f64 / n as f64;
    let var = if n > 1 {
        (n * sumsq - sum * sum) as f64 / (n * (n - 1)) as f64
    } else {
        0.0
    };
    (mean, var)
}
