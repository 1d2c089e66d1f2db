//! Stationarity, distribution comparison and resampling.

pub mod adf;
pub mod bootstrap;
pub mod ks;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use adf::{adf_test, mackinnon_crit, mackinnon_p, AdfOptions, AdfResult, Regression};
pub use bootstrap::{bootstrap_means, BootstrapResult};
pub use ks::{kolmogorov_q, ks_statistic, ks_two_sample, KsMode, KsResult};

use crate::error::Result;

/// Fraction of `trials` for which `trial` returns true. Trial `i` gets a
/// generator seeded with `seed` on stream `i`, so the rate is the same for
/// any thread count.
pub fn rejection_rate<F>(trials: usize, seed: u64, trial: F) -> Result<f64>
where
    F: Fn(&mut ChaCha8Rng) -> Result<bool> + Sync,
{
    if trials == 0 {
        return Ok(0.0);
    }
    let hits = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            trial(&mut rng).map(usize::from)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(hits as f64 / trials as f64)
}
