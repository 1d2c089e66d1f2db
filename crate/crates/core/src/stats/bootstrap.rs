//! Bootstrap distribution of the sample mean.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    /// One mean per draw, in draw order.
    pub means: Vec<f64>,
    pub n_samples: usize,
    pub fraction: f64,
    /// Values per draw.
    pub draw_size: usize,
    pub seed: u64,
}

impl BootstrapResult {
    pub fn mean(&self) -> f64 {
        self.means.iter().sum::<f64>() / self.means.len() as f64
    }

    /// Sample standard deviation of the draw means.
    pub fn std_dev(&self) -> f64 {
        let k = self.means.len();
        if k < 2 {
            return 0.0;
        }
        let m = self.mean();
        (self.means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt()
    }
}

/// Mean of `k` draws from `values` with replacement, accumulated as offsets
/// from the minimum so a constant input returns exactly that constant.
fn draw_mean(values: &[f64], k: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> f64 {
    let mut acc = 0.0;
    for _ in 0..k {
        acc += values[rng.gen_range(0..values.len())] - lo;
    }
    (lo + acc / k as f64).clamp(lo, hi)
}

/// `n_samples` draws of size `ceil(fraction · N)` with replacement. Draw `i`
/// uses its own ChaCha stream, so the result does not depend on threading.
pub fn bootstrap_means(
    values: &[f64],
    n_samples: usize,
    fraction: f64,
    seed: u64,
) -> Result<BootstrapResult> {
    if values.is_empty() {
        return Err(Error::invalid("bootstrap of an empty sample"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("bootstrap values must be finite"));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!(
            "fraction must be in (0, 1], got {fraction}"
        )));
    }
    if n_samples == 0 {
        return Err(Error::invalid("n_samples must be at least 1"));
    }
    let k = ((fraction * values.len() as f64).ceil() as usize).clamp(1, values.len());
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let means = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            draw_mean(values, k, lo, hi, &mut rng)
        })
        .collect();
    Ok(BootstrapResult {
        means,
        n_samples,
        fraction,
        draw_size: k,
        seed,
    })
}
