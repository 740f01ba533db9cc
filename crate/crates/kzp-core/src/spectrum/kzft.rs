//! Kolmogorov-Zurbenko Fourier transform and the periodogram built on it.
//!
//! The transform demodulates a series at one frequency and then applies `k`
//! passes of a moving average of width `m`. The iterated average is an
//! excellent low pass filter, so the surviving complex amplitude tracks the
//! signal content in a narrow band around the chosen frequency. Gaps are
//! handled by zero filling the numerator and dividing by the identically
//! filtered observation mask; windows whose mask coverage falls below one
//! half are dropped rather than rescaled into noise.

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{KzpError, Result};
use crate::series::TimeSeries;
use crate::spectrum::periodogram::{phasor, Periodogram};
use crate::spectrum::FrequencyGrid;

/// Minimum fraction of observed samples a window needs to yield a
/// coefficient.
const MIN_COVERAGE: f64 = 0.5;

/// Complex band amplitudes over a set of time stamps.
///
/// Produced by [`kzft`]; time stamps are strictly increasing but need not be
/// contiguous, because low coverage windows are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries {
    times: Vec<i64>,
    coefficients: Vec<Complex64>,
}

impl ComplexSeries {
    fn from_parts(times: Vec<i64>, coefficients: Vec<Complex64>) -> Self {
        debug_assert_eq!(times.len(), coefficients.len());
        debug_assert!(times.windows(2).all(|w| w[0] < w[1]));
        Self {
            times,
            coefficients,
        }
    }

    /// Number of coefficients.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// True when every window was dropped for lack of coverage.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Time stamps the coefficients are centered on, strictly increasing.
    pub fn times(&self) -> &[i64] {
        &self.times
    }

    /// Complex amplitudes, parallel to [`Self::times`].
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Iterates over `(time, coefficient)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.times
            .iter()
            .zip(&self.coefficients)
            .map(|(&t, &c)| (t, c))
    }
}

/// Moving average of width `m` over any type with linear arithmetic.
///
/// Uses a running sum with subtract-the-oldest updates, refreshed from
/// scratch every 512 steps so rounding drift cannot accumulate over long
/// inputs.
fn sliding_mean<T>(input: &[T], m: usize) -> Vec<T>
where
    T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    debug_assert!(m >= 1 && input.len() >= m);
    let inv = 1.0 / m as f64;
    let n_out = input.len() - m + 1;
    let fresh = |at: usize| {
        input[at..at + m]
            .iter()
            .fold(T::default(), |acc, &x| acc + x)
    };
    let mut out = Vec::with_capacity(n_out);
    let mut acc = fresh(0);
    out.push(acc * inv);
    for i in 1..n_out {
        if i % 512 == 0 {
            acc = fresh(i);
        } else {
            acc = acc + input[i + m - 1] - input[i - 1];
        }
        out.push(acc * inv);
    }
    out
}

/// Demodulates the unmasked samples at frequency `f` and applies `k` moving
/// average passes of width `m`. Masked positions enter as zero.
fn demodulated_window_means(
    values: &[f64],
    mask: &[bool],
    m: usize,
    k: usize,
    f: f64,
) -> Vec<Complex64> {
    let step = phasor(-f);
    let mut w = Complex64::new(1.0, 0.0);
    let mut demodulated = Vec::with_capacity(values.len());
    for (r, (&x, &observed)) in values.iter().zip(mask).enumerate() {
        if r % 256 == 0 {
            w = phasor(-f * r as f64);
        }
        demodulated.push(if observed {
            w * x
        } else {
            Complex64::default()
        });
        w *= step;
    }
    let mut current = demodulated;
    for _ in 0..k {
        current = sliding_mean(&current, m);
    }
    current
}

/// Applies `k` moving average passes of width `m` to the mask itself,
/// yielding the fraction of observed samples under each window.
fn mask_coverage(mask: &[bool], m: usize, k: usize) -> Vec<f64> {
    let mut current: Vec<f64> = mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    for _ in 0..k {
        current = sliding_mean(&current, m);
    }
    current
}

fn filter_support(m: usize, k: usize) -> Result<usize> {
    if m < 2 {
        return Err(KzpError::InvalidParameter {
            name: "m",
            message: format!("window width must be at least 2, got {m}"),
        });
    }
    if k == 0 {
        return Err(KzpError::InvalidParameter {
            name: "k",
            message: "iteration count must be positive".into(),
        });
    }
    k.checked_mul(m - 1)
        .and_then(|v| v.checked_add(1))
        .ok_or(KzpError::InvalidParameter {
            name: "k",
            message: format!("filter support k (m - 1) + 1 overflows for m = {m}, k = {k}"),
        })
}

/// Kolmogorov-Zurbenko Fourier transform of a series at one frequency.
///
/// Returns the complex amplitude of the band around `frequency` (in cycles
/// per sample, within `[0, 0.5]`) for every window position whose mask
/// coverage after filtering is at least one half. Each amplitude is stamped
/// with the time at the center of its window of support, which spans
/// `k (m - 1) + 1` samples. The series must be at least that long.
///
/// The result can be empty when gaps are dense; no error is raised for that
/// here, since sparse single-frequency output is still useful.
pub fn kzft(ts: &TimeSeries, m: usize, k: usize, frequency: f64) -> Result<ComplexSeries> {
    if !frequency.is_finite() || !(0.0..=0.5).contains(&frequency) {
        return Err(KzpError::InvalidParameter {
            name: "frequency",
            message: format!("must lie in [0, 0.5], got {frequency}"),
        });
    }
    let support = filter_support(m, k)?;
    if ts.len() < support {
        return Err(KzpError::SeriesTooShort {
            len: ts.len(),
            support,
        });
    }
    let numerator = demodulated_window_means(ts.values(), ts.mask(), m, k, frequency);
    let coverage = mask_coverage(ts.mask(), m, k);
    let half_support = (support - 1) / 2;
    let mut times = Vec::new();
    let mut coefficients = Vec::new();
    for (i, (&num, &cov)) in numerator.iter().zip(&coverage).enumerate() {
        if cov >= MIN_COVERAGE {
            times.push(ts.start_index() + (i + half_support) as i64);
            coefficients.push(num / cov);
        }
    }
    Ok(ComplexSeries::from_parts(times, coefficients))
}

/// Kolmogorov-Zurbenko periodogram on the natural grid of step `1 / m`.
///
/// See [`kz_periodogram_oversampled`]; this uses an oversampling factor of
/// one.
pub fn kz_periodogram(ts: &TimeSeries, m: usize, k: usize) -> Result<Periodogram> {
    kz_periodogram_oversampled(ts, m, k, 1)
}

/// Kolmogorov-Zurbenko periodogram over frequencies `j / (m * oversample)`.
///
/// The observed mean is removed, then each grid frequency is scanned with the
/// transform of [`kzft`] and its intensity is the average squared amplitude
/// over the surviving windows, divided by `2 pi` times the grid step:
///
/// ```text
/// I(f) = mean over valid windows of |coefficient|^2 / (2 pi step)
/// ```
///
/// With that scaling, a unit amplitude sinusoid on the grid concentrates the
/// same spectral mass as it does in the raw periodogram. Fails with
/// [`KzpError::NoValidWindows`] when every window drops below half coverage,
/// which happens once missingness is heavy enough.
pub fn kz_periodogram_oversampled(
    ts: &TimeSeries,
    m: usize,
    k: usize,
    oversample: usize,
) -> Result<Periodogram> {
    if oversample == 0 {
        return Err(KzpError::InvalidParameter {
            name: "oversample",
            message: "oversampling factor must be positive".into(),
        });
    }
    let support = filter_support(m, k)?;
    if ts.len() < support {
        return Err(KzpError::SeriesTooShort {
            len: ts.len(),
            support,
        });
    }
    let n_observed = ts.n_observed();
    if n_observed < 2 {
        return Err(KzpError::InsufficientObservations {
            needed: 2,
            available: n_observed,
        });
    }
    let mean = ts.stats()?.mean;
    let demeaned: Vec<f64> = ts
        .values()
        .iter()
        .zip(ts.mask())
        .map(|(&x, &observed)| if observed { x - mean } else { 0.0 })
        .collect();
    let coverage = mask_coverage(ts.mask(), m, k);
    let valid: Vec<usize> = (0..coverage.len())
        .filter(|&i| coverage[i] >= MIN_COVERAGE)
        .collect();
    if valid.is_empty() {
        return Err(KzpError::NoValidWindows);
    }
    let denominator = m
        .checked_mul(oversample)
        .ok_or(KzpError::InvalidParameter {
            name: "oversample",
            message: format!("grid denominator m * oversample overflows for m = {m}"),
        })?;
    let grid = FrequencyGrid::with_denominator(denominator)?;
    let scale = 1.0 / (TAU * grid.step());
    let mut intensity = Vec::with_capacity(grid.len());
    for f in grid.points() {
        let window_means = demodulated_window_means(&demeaned, ts.mask(), m, k, f);
        let mut power = 0.0;
        for &i in &valid {
            power += (window_means[i] / coverage[i]).norm_sqr();
        }
        intensity.push(power / valid.len() as f64 * scale);
    }
    Periodogram::new(grid, intensity, valid.len())
}
