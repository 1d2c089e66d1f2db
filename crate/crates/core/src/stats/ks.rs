//! Two-sample Kolmogorov-Smirnov test.
//!
//! With samples in the hundreds of thousands the asymptotic test rejects on
//! differences of no practical size. The subsampled mode compares many
//! seeded, equal-size subsamples instead and reports the median p-value.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum KsMode {
    Asymptotic,
    Subsampled {
        size: usize,
        repetitions: usize,
        seed: u64,
    },
}

impl KsMode {
    pub fn subsampled(seed: u64) -> Self {
        KsMode::Subsampled {
            size: 1000,
            repetitions: 100,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    /// Full-sample statistic.
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub m: usize,
    pub mode: KsMode,
}

/// Kolmogorov survival function `Q(λ) = P(K > λ)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let q = if lambda < 1.18 {
        // Jacobi theta form, fast for small λ
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (1..=20)
            .map(|k| ((2 * k - 1) as f64).powi(2))
            .map(|j| (c * j).exp())
            .sum();
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp()
            })
            .sum();
        2.0 * s
    };
    q.clamp(0.0, 1.0)
}

fn sorted(v: &[f64]) -> Result<Vec<f64>> {
    if v.iter().any(|x| x.is_nan()) {
        return Err(Error::invalid("sample contains NaN"));
    }
    let mut s = v.to_vec();
    s.sort_unstable_by(f64::total_cmp);
    Ok(s)
}

/// `sup |F_x − F_y|` of two sorted samples, stepping over tied values
/// together.
fn statistic_sorted(x: &[f64], y: &[f64]) -> f64 {
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] == v {
            i += 1;
        }
        while j < y.len() && y[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

pub fn ks_statistic(x: &[f64], y: &[f64]) -> Result<f64> {
    check(x, y)?;
    Ok(statistic_sorted(&sorted(x)?, &sorted(y)?))
}

fn check(x: &[f64], y: &[f64]) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::invalid("KS test needs two non-empty samples"));
    }
    Ok(())
}

fn asymptotic_p(d: f64, n: usize, m: usize) -> f64 {
    let en = (n as f64 * m as f64) / (n + m) as f64;
    kolmogorov_q(en.sqrt() * d)
}

pub fn ks_two_sample(x: &[f64], y: &[f64], mode: KsMode) -> Result<KsResult> {
    check(x, y)?;
    if let KsMode::Subsampled { size: 0, .. } | KsMode::Subsampled { repetitions: 0, .. } = mode {
        return Err(Error::invalid(
            "subsample size and repetitions must be positive",
        ));
    }
    let (xs, ys) = (sorted(x)?, sorted(y)?);
    let d = statistic_sorted(&xs, &ys);
    let p_value = match mode {
        // identical empirical distributions; subsampling would only add noise
        _ if d == 0.0 => 1.0,
        KsMode::Asymptotic => asymptotic_p(d, xs.len(), ys.len()),
        KsMode::Subsampled {
            size,
            repetitions,
            seed,
        } => {
            let mut ps: Vec<f64> = (0..repetitions)
                .into_par_iter()
                .map(|r| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(r as u64);
                    let mut draw = |v: &[f64]| {
                        if v.len() <= size {
                            return v.to_vec();
                        }
                        let mut s: Vec<f64> = sample(&mut rng, v.len(), size)
                            .into_iter()
                            .map(|i| v[i])
                            .collect();
                        s.sort_unstable_by(f64::total_cmp);
                        s
                    };
                    let (sx, sy) = (draw(&xs), draw(&ys));
                    asymptotic_p(statistic_sorted(&sx, &sy), sx.len(), sy.len())
                })
                .collect();
            ps.sort_unstable_by(f64::total_cmp);
            let k = ps.len();
            if k % 2 == 1 {
                ps[k / 2]
            } else {
                (ps[k / 2 - 1] + ps[k / 2]) / 2.0
            }
        }
    };
    Ok(KsResult {
        statistic: d,
        p_value,
        n: xs.len(),
        m: ys.len(),
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_and_disjoint() {
        let x = [3.0, 1.0, 2.0, 2.0];
        let r = ks_two_sample(&x, &[2.0, 3.0, 2.0, 1.0], KsMode::Asymptotic).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
        assert_eq!(ks_statistic(&[0.0; 5], &[1.0; 7]).unwrap(), 1.0);
    }

    #[test]
    fn hand_example() {
        // gaps at 1, 2, 3: 1/3, 2/3 − 1/2, 1 − 1/2
        assert_eq!(ks_statistic(&[1.0, 2.0, 3.0], &[2.0, 4.0]).unwrap(), 0.5);
    }

    #[test]
    fn kolmogorov_reference_points() {
        // P(K > λ) at λ = 0.5, 1, 1.36, 2
        for (l, q) in [
            (0.5, 0.963_945_243_664_875),
            (1.0, 0.269_999_671_677_354_5),
            (1.36, 0.049_485_876_755_378),
            (2.0, 0.000_670_925_255_779_695),
        ] {
            assert!((kolmogorov_q(l) - q).abs() < 1e-9, "{l}");
        }
        // the two series agree across the switch point
        let a = kolmogorov_q(1.18 - 1e-12);
        let b = kolmogorov_q(1.18);
        assert!((a - b).abs() < 1e-10);
        assert_eq!(kolmogorov_q(0.0), 1.0);
    }

    #[test]
    fn empty_rejected() {
        assert!(ks_two_sample(&[], &[1.0], KsMode::Asymptotic).is_err());
    }

    #[test]
    fn subsampled_is_seeded() {
        let x: Vec<f64> = (0..5000).map(|i| (i as f64 * 0.618).fract()).collect();
        let y: Vec<f64> = (0..4000).map(|i| (i as f64 * 0.414).fract()).collect();
        let a = ks_two_sample(&x, &y, KsMode::subsampled(7)).unwrap();
        assert_eq!(a, ks_two_sample(&x, &y, KsMode::subsampled(7)).unwrap());
        assert!((0.0..=1.0).contains(&a.p_value));
    }

    proptest! {
        #[test]
        fn monotone_transform_invariance(
            x in proptest::collection::vec(-50i32..50, 1..60),
            y in proptest::collection::vec(-50i32..50, 1..60),
        ) {
            let fx: Vec<f64> = x.iter().map(|&v| v as f64).collect();
            let fy: Vec<f64> = y.iter().map(|&v| v as f64).collect();
            let d = ks_statistic(&fx, &fy).unwrap();
            let g = |v: &f64| (v / 10.0).exp() * 3.0 + 1.0;
            let d2 = ks_statistic(&fx.iter().map(g).collect::<Vec<_>>(), &fy.iter().map(g).collect::<Vec<_>>()).unwrap();
            prop_assert_eq!(d, d2);
            prop_assert!((0.0..=1.0).contains(&d));

            // brute force over the pooled support
            let cdf = |s: &[f64], t: f64| s.iter().filter(|&&v| v <= t).count() as f64 / s.len() as f64;
            let brute = fx.iter().chain(&fy).map(|&t| (cdf(&fx, t) - cdf(&fy, t)).abs()).fold(0.0, f64::max);
            prop_assert!((brute - d).abs() < 1e-12);
        }
    }
}
