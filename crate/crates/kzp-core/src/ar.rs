//! Autoregressive baseline fits.
//!
//! A periodic signal hides badly in an autoregressive model: the model can
//! chase short range correlation, but a persistent oscillation leaves a large
//! share of variance unexplained. Fitting an AR baseline therefore gives a
//! useful reference number for how much structure a spectral method should
//! be expected to recover.
//!
//! Models are fit by solving the Yule-Walker equations with the
//! Levinson-Durbin recursion on the biased sample autocovariance, selecting
//! the order by the Akaike information criterion.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{KzpError, Result};
use crate::series::TimeSeries;

/// A fitted autoregressive model.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    /// Selected order, possibly zero.
    pub order: usize,
    /// Coefficients of lags `1..=order`.
    pub coefficients: Vec<f64>,
    /// Innovation variance of the selected model.
    pub noise_variance: f64,
    /// Akaike information criterion value of the selected model.
    pub aic: f64,
    /// Whether every reflection coefficient stayed inside the unit interval.
    pub stationary: bool,
}

fn demeaned_values(ts: &TimeSeries) -> Result<Vec<f64>> {
    if ts.n_observed() != ts.len() {
        return Err(KzpError::MaskedInputUnsupported);
    }
    let stats = ts.stats()?;
    if stats.variance == 0.0 {
        return Err(KzpError::ZeroVariance);
    }
    Ok(ts.values().iter().map(|v| v - stats.mean).collect())
}

fn autocovariance(demeaned: &[f64], max_lag: usize) -> Vec<f64> {
    let n = demeaned.len() as f64;
    (0..=max_lag)
        .map(|lag| {
            let mut acc = 0.0;
            for t in 0..demeaned.len() - lag {
                acc += demeaned[t] * demeaned[t + lag];
            }
            acc / n
        })
        .collect()
}

/// Sample autocorrelation at lags `0..=max_lag`.
///
/// Uses the biased estimator with divisor `n`, so the sequence is a valid
/// correlation function and the lag zero entry is exactly one. The series
/// must be fully observed, non-constant, and longer than `max_lag`.
pub fn acf(ts: &TimeSeries, max_lag: usize) -> Result<Vec<f64>> {
    if max_lag >= ts.len() {
        return Err(KzpError::InvalidParameter {
            name: "max_lag",
            message: format!(
                "must be below the series length {}, got {max_lag}",
                ts.len()
            ),
        });
    }
    let demeaned = demeaned_values(ts)?;
    let acov = autocovariance(&demeaned, max_lag);
    Ok(acov.iter().map(|c| c / acov[0]).collect())
}

/// Writes correlations as `lag,correlation` rows under a header.
pub fn write_acf_csv<P: AsRef<Path>>(path: P, correlations: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("lag,correlation\n");
    for (lag, r) in correlations.iter().enumerate() {
        let _ = writeln!(out, "{lag},{r}");
    }
    fs::write(path, out).map_err(|source| KzpError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Default maximum candidate order, `floor(10 log10 n)`.
pub fn default_max_order(n: usize) -> usize {
    (10.0 * (n as f64).log10()).floor() as usize
}

/// Levinson-Durbin recursion with AIC order selection.
///
/// Walks orders `0..=acov.len() - 1`, keeping the order whose
/// `n ln(sigma^2) + 2 p` is smallest. Returns the selected order, its
/// coefficients, innovation variance, AIC, and whether all reflection
/// coefficients up to that order stayed below one in magnitude.
fn levinson_aic(acov: &[f64], n: f64) -> (usize, Vec<f64>, f64, f64, bool) {
    let max_order = acov.len() - 1;
    let mut phi = vec![0.0; max_order + 1];
    let mut prev = vec![0.0; max_order + 1];
    let mut sigma2 = acov[0];
    let mut stationary_so_far = true;
    let mut best = (0, Vec::new(), sigma2, n * sigma2.ln(), true);
    for p in 1..=max_order {
        let mut acc = acov[p];
        for j in 1..p {
            acc -= phi[j] * acov[p - j];
        }
        let kappa = acc / sigma2;
        prev[..p].copy_from_slice(&phi[..p]);
        phi[p] = kappa;
        for j in 1..p {
            phi[j] = prev[j] - kappa * prev[p - j];
        }
        sigma2 *= 1.0 - kappa * kappa;
        if !sigma2.is_finite() || sigma2 <= 0.0 {
            break;
        }
        if kappa.abs() >= 1.0 {
            stationary_so_far = false;
        }
        let aic = n * sigma2.ln() + 2.0 * p as f64;
        if aic < best.3 {
            best = (p, phi[1..=p].to_vec(), sigma2, aic, stationary_so_far);
        }
    }
    best
}

/// Fits an autoregressive model by Yule-Walker with AIC order selection.
///
/// Candidate orders run from zero to `max_order`, which defaults to
/// `floor(10 log10 n)` and is capped below the series length. The series
/// must be fully observed and non-constant.
pub fn yule_walker(ts: &TimeSeries, max_order: Option<usize>) -> Result<ArModel> {
    let demeaned = demeaned_values(ts)?;
    let cap = ts.len() - 1;
    let max_order = max_order
        .unwrap_or_else(|| default_max_order(ts.len()))
        .min(cap);
    let acov = autocovariance(&demeaned, max_order);
    let (order, coefficients, noise_variance, aic, stationary) =
        levinson_aic(&acov, ts.len() as f64);
    Ok(ArModel {
        order,
        coefficients,
        noise_variance,
        aic,
        stationary,
    })
}

/// Share of the series variance the model's innovations fail to explain.
///
/// A value near one means the autoregression found almost no exploitable
/// short range structure.
pub fn unexplained_ratio(model: &ArModel, ts: &TimeSeries) -> Result<f64> {
    let stats = ts.stats()?;
    if stats.variance == 0.0 {
        return Err(KzpError::ZeroVariance);
    }
    Ok(model.noise_variance / stats.variance)
}
