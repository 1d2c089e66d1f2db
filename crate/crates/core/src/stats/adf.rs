//! Augmented Dickey-Fuller unit-root test.
//!
//! The test regression is
//!
//! ```text
//! Δy_t = c [+ β·t] + γ·y_{t−1} + Σ_{i=1..p} φ_i·Δy_{t−i} + ε_t
//! ```
//!
//! and the statistic is the t-ratio of γ̂. The lag order starts at the Schwert
//! bound `floor(12·(n/100)^(1/4))` and is pruned from the top while the last
//! lag's |t| stays below the two-sided 10% normal quantile; selection runs
//! on a common sample, then the chosen model is refit on all usable rows.
//!
//! p-values and critical values come from MacKinnon's response surfaces
//! (J. G. MacKinnon, "Approximate asymptotic distribution functions for
//! unit-root and cointegration tests", JBES 12, 1994; and "Critical values
//! for cointegration tests", QED working paper 1227, 2010), single-series
//! case.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regression {
    /// Constant only.
    #[default]
    Constant,
    /// Constant and linear trend.
    ConstantTrend,
}

impl Regression {
    fn deterministic_terms(self) -> usize {
        match self {
            Regression::Constant => 1,
            Regression::ConstantTrend => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regression::Constant => "c",
            Regression::ConstantTrend => "ct",
        }
    }
}

struct Surface {
    tau_max: f64,
    tau_min: f64,
    tau_star: f64,
    small: [f64; 3],
    large: [f64; 4],
    /// 1%, 5%, 10% finite-sample critical value coefficients in 1/T.
    crit: [[f64; 4]; 3],
}

const SURFACE_C: Surface = Surface {
    tau_max: 2.74,
    tau_min: -18.83,
    tau_star: -1.61,
    small: [2.1659, 1.4412, 3.8269e-2],
    large: [1.7339, 0.93202, -0.12745, -0.010368],
    crit: [
        [-3.43035, -6.5393, -16.786, -79.433],
        [-2.86154, -2.8903, -4.234, -40.040],
        [-2.56677, -1.5384, -2.809, 0.0],
    ],
};

const SURFACE_CT: Surface = Surface {
    tau_max: 0.7,
    tau_min: -16.18,
    tau_star: -2.89,
    small: [3.2512, 1.6047, 4.9588e-2],
    large: [2.5261, 0.61654, -0.37956, -0.060285],
    crit: [
        [-3.95877, -9.0531, -28.428, -134.155],
        [-3.41049, -4.3904, -9.036, -45.374],
        [-3.12705, -2.5856, -3.925, -22.380],
    ],
};

fn surface(r: Regression) -> &'static Surface {
    match r {
        Regression::Constant => &SURFACE_C,
        Regression::ConstantTrend => &SURFACE_CT,
    }
}

/// Horner evaluation of `c[0] + c[1]·x + c[2]·x² + …`.
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &b| acc * x + b)
}

/// MacKinnon (1994) approximate asymptotic p-value of an ADF statistic.
pub fn mackinnon_p(stat: f64, regression: Regression) -> f64 {
    let s = surface(regression);
    if stat > s.tau_max {
        return 1.0;
    }
    if stat < s.tau_min {
        return 0.0;
    }
    let z = if stat <= s.tau_star {
        poly(&s.small, stat)
    } else {
        poly(&s.large, stat)
    };
    Normal::standard().cdf(z)
}

/// MacKinnon (2010) critical values at 1%, 5% and 10% for `nobs`
/// observations.
pub fn mackinnon_crit(regression: Regression, nobs: usize) -> [f64; 3] {
    let inv = 1.0 / nobs as f64;
    surface(regression).crit.map(|c| poly(&c, inv))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub p_value: f64,
    pub lags_used: usize,
    /// Rows in the final regression.
    pub n_obs: usize,
    pub regression: Regression,
    /// 1%, 5%, 10%.
    pub critical_values: [f64; 3],
}

impl AdfResult {
    /// `**` when the statistic is below the 5% critical value, `*` below the
    /// 10% one.
    pub fn stars(&self) -> &'static str {
        if self.statistic < self.critical_values[1] {
            "**"
        } else if self.statistic < self.critical_values[2] {
            "*"
        } else {
            ""
        }
    }

    pub fn rejects_at(&self, level: f64) -> bool {
        self.p_value < level
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdfOptions {
    /// Upper bound on the lag order; the Schwert bound when `None`.
    pub max_lags: Option<usize>,
    pub regression: Regression,
    /// Skip pruning and use `max_lags` as is.
    pub fixed_lags: bool,
}

impl Default for AdfOptions {
    fn default() -> Self {
        Self {
            max_lags: None,
            regression: Regression::Constant,
            fixed_lags: false,
        }
    }
}

pub const MIN_OBSERVATIONS: usize = 10;

/// Two-sided 10% standard normal quantile, the lag pruning threshold.
const PRUNE_T: f64 = 1.6448536269514722;

pub fn schwert_max_lag(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Design columns, in order: deterministic terms, y_{t−1}, Δy_{t−1..p}.
/// Rows cover dy indices `start..dy.len()`.
fn design(
    y: &[f64],
    dy: &[f64],
    start: usize,
    lags: usize,
    r: Regression,
) -> (DMatrix<f64>, DVector<f64>) {
    let rows = dy.len() - start;
    let det = r.deterministic_terms();
    let cols = det + 1 + lags;
    let mut x = DMatrix::zeros(rows, cols);
    for (row, t) in (start..dy.len()).enumerate() {
        x[(row, 0)] = 1.0;
        if det == 2 {
            x[(row, 1)] = (t + 1) as f64;
        }
        x[(row, det)] = y[t];
        for i in 1..=lags {
            x[(row, det + i)] = dy[t - i];
        }
    }
    let target = DVector::from_iterator(rows, dy[start..].iter().copied());
    (x, target)
}

/// OLS from cross products on the leading `k` columns. Returns the
/// coefficient vector and the standard errors.
fn ols_moments(
    xtx: &DMatrix<f64>,
    xty: &DVector<f64>,
    yty: f64,
    nobs: usize,
    k: usize,
) -> Result<(DVector<f64>, DVector<f64>)> {
    if nobs <= k {
        return Err(Error::Series(format!(
            "{nobs} usable rows cannot fit {k} regressors"
        )));
    }
    let a = xtx.view((0, 0), (k, k)).into_owned();
    let b = xty.rows(0, k).into_owned();
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::Series("singular regression design".into()))?;
    let beta = chol.solve(&b);
    let rss = (yty - beta.dot(&b)).max(0.0);
    let s2 = rss / (nobs - k) as f64;
    let inv = chol.inverse();
    let se = DVector::from_iterator(k, (0..k).map(|i| (s2 * inv[(i, i)]).sqrt()));
    Ok((beta, se))
}

fn fit(y: &[f64], dy: &[f64], start: usize, lags: usize, r: Regression) -> Result<(f64, usize)> {
    let (x, t) = design(y, dy, start, lags, r);
    let k = x.ncols();
    let (beta, se) = ols_moments(
        &(x.transpose() * &x),
        &(x.transpose() * &t),
        t.dot(&t),
        x.nrows(),
        k,
    )?;
    let g = r.deterministic_terms();
    Ok((beta[g] / se[g], x.nrows()))
}

/// ADF test of `series`.
pub fn adf_test(series: &[f64], opts: &AdfOptions) -> Result<AdfResult> {
    let n = series.len();
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::Series("series contains a non-finite value".into()));
    }
    if n < MIN_OBSERVATIONS {
        return Err(Error::Series(format!(
            "series has {n} points, at least {MIN_OBSERVATIONS} required"
        )));
    }
    let max_lags = match opts.max_lags {
        Some(m) => {
            if n < MIN_OBSERVATIONS + m {
                return Err(Error::Series(format!(
                    "series has {n} points, {} required for {m} lags",
                    MIN_OBSERVATIONS + m
                )));
            }
            m
        }
        None => schwert_max_lag(n)
            .min(n - MIN_OBSERVATIONS)
            .min((n / 2).saturating_sub(opts.regression.deterministic_terms() + 2)),
    };

    // Standardizing leaves the t-ratio unchanged in exact arithmetic and
    // keeps the cross products well scaled.
    let mean = series.iter().sum::<f64>() / n as f64;
    let sd = (series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    if sd == 0.0 || !sd.is_finite() {
        return Err(Error::Series("series is constant".into()));
    }
    let y: Vec<f64> = series.iter().map(|v| (v - mean) / sd).collect();
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    if dy.iter().all(|&d| d == 0.0) {
        return Err(Error::Series("series is constant".into()));
    }

    let det = opts.regression.deterministic_terms();
    let lags = if opts.fixed_lags || max_lags == 0 {
        max_lags
    } else {
        let (x, t) = design(&y, &dy, max_lags, max_lags, opts.regression);
        let xtx = x.transpose() * &x;
        let xty = x.transpose() * &t;
        let yty = t.dot(&t);
        let mut chosen = 0;
        for p in (1..=max_lags).rev() {
            let k = det + 1 + p;
            let (beta, se) = ols_moments(&xtx, &xty, yty, x.nrows(), k)?;
            if (beta[k - 1] / se[k - 1]).abs() >= PRUNE_T {
                chosen = p;
                break;
            }
        }
        chosen
    };

    let (statistic, n_obs) = fit(&y, &dy, lags, lags, opts.regression)?;
    if !statistic.is_finite() {
        return Err(Error::Series("degenerate regression".into()));
    }
    Ok(AdfResult {
        statistic,
        p_value: mackinnon_p(statistic, opts.regression),
        lags_used: lags,
        n_obs,
        regression: opts.regression,
        critical_values: mackinnon_crit(opts.regression, n_obs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn p_value_matches_published_row() {
        // a statistic of −4.340 is reported with p = 0.0004
        let p = mackinnon_p(-4.340, Regression::Constant);
        assert_eq!(format!("{p:.4}"), "0.0004");
    }

    #[test]
    fn p_value_edges_and_monotonicity() {
        for r in [Regression::Constant, Regression::ConstantTrend] {
            assert_eq!(mackinnon_p(5.0, r), 1.0);
            assert_eq!(mackinnon_p(-30.0, r), 0.0);
            let mut last = 0.0;
            for k in -180..30 {
                let p = mackinnon_p(k as f64 / 10.0, r);
                assert!(p >= last, "{r:?} at {k}");
                last = p;
            }
        }
    }

    #[test]
    fn asymptotic_critical_values() {
        let [c1, c5, c10] = mackinnon_crit(Regression::Constant, usize::MAX);
        assert!(
            (c1 + 3.43035).abs() < 1e-6
                && (c5 + 2.86154).abs() < 1e-6
                && (c10 + 2.56677).abs() < 1e-6
        );
        // the 5% critical value lands near p = 0.05
        let p = mackinnon_p(
            mackinnon_crit(Regression::Constant, 10_000)[1],
            Regression::Constant,
        );
        assert!((p - 0.05).abs() < 0.005, "{p}");
    }

    #[test]
    fn short_and_constant_series_rejected() {
        assert!(adf_test(&[1.0; 9], &AdfOptions::default()).is_err());
        assert!(adf_test(&[2.0; 100], &AdfOptions::default()).is_err());
        let opts = AdfOptions {
            max_lags: Some(15),
            ..Default::default()
        };
        assert!(adf_test(&noise(20, 0), &opts).is_err());
        assert!(adf_test(
            &[1.0, f64::NAN, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0],
            &AdfOptions::default()
        )
        .is_err());
    }

    #[test]
    fn affine_invariance() {
        let y = noise(300, 3);
        let base = adf_test(&y, &AdfOptions::default()).unwrap();
        for (a, b) in [(2.5, -7.0), (-0.001, 1e3), (1e4, 0.0)] {
            let z: Vec<f64> = y.iter().map(|v| a * v + b).collect();
            let r = adf_test(&z, &AdfOptions::default()).unwrap();
            assert!((r.statistic - base.statistic).abs() < 1e-8, "{a} {b}");
            assert_eq!(r.lags_used, base.lags_used);
        }
    }

    #[test]
    fn white_noise_rejects_and_walk_does_not() {
        let wn = adf_test(&noise(500, 1), &AdfOptions::default()).unwrap();
        assert!(wn.rejects_at(0.05), "{wn:?}");
        let mut acc = 0.0;
        let walk: Vec<f64> = noise(500, 2)
            .into_iter()
            .map(|e| {
                acc += e;
                acc
            })
            .collect();
        let rw = adf_test(
            &walk,
            &AdfOptions {
                regression: Regression::ConstantTrend,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(rw.p_value > 0.01, "{rw:?}");
        assert_eq!(
            rw.critical_values,
            mackinnon_crit(Regression::ConstantTrend, rw.n_obs)
        );
    }

    #[test]
    fn fixed_lag_regression_matches_direct_fit() {
        let y = noise(60, 5);
        let opts = AdfOptions {
            max_lags: Some(2),
            fixed_lags: true,
            ..Default::default()
        };
        let r = adf_test(&y, &opts).unwrap();
        assert_eq!(r.lags_used, 2);
        assert_eq!(r.n_obs, 57);

        // QR solve of the same regression on the raw series
        let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
        let (x, t) = design(&y, &dy, 2, 2, Regression::Constant);
        let qr = x.clone().qr();
        let beta = qr
            .r()
            .solve_upper_triangular(&(qr.q().transpose() * &t))
            .unwrap();
        let resid = &t - &x * &beta;
        let s2 = resid.dot(&resid) / (x.nrows() - x.ncols()) as f64;
        let rinv = qr.r().try_inverse().unwrap();
        let cov = &rinv * rinv.transpose() * s2;
        let direct = beta[1] / cov[(1, 1)].sqrt();
        assert!(
            (direct - r.statistic).abs() < 1e-9,
            "{direct} {}",
            r.statistic
        );
    }
}
