//! Time domain reconstruction from band limited complex amplitudes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{KzpError, Result};
use crate::series::TimeSeries;
use crate::spectrum::{kzft, ComplexSeries};

/// A reconstructed signal estimate together with its per band amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    /// Estimated signal. Samples outside the filter's valid window range,
    /// or where coverage was too low, are masked.
    pub estimate: TimeSeries,
    /// The complex amplitude series behind each requested frequency.
    pub components: Vec<(f64, ComplexSeries)>,
    /// Number of samples of filter support lost at each end of the series.
    pub warmup: usize,
}

/// Agreement between a signal estimate and a reference signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitMetrics {
    /// Pearson correlation over jointly observed samples.
    pub r: f64,
    /// Squared correlation, the fraction of variance explained.
    pub r_squared: f64,
    /// Number of jointly observed samples that were scored.
    pub n_scored: usize,
}

/// Rebuilds the deterministic part of a series from a few frequency bands.
///
/// For every requested frequency the Kolmogorov-Zurbenko Fourier transform
/// with parameters `m` and `k` supplies a slowly varying complex amplitude
/// `c_f(t)`, and the estimate at time `t` sums the corresponding real
/// oscillations:
///
/// ```text
/// estimate(t) = sum over f of 2 Re( c_f(t) exp(i 2 pi f t) )
/// ```
///
/// Frequencies must be strictly inside `(0, 0.5)` and distinct; the doubling
/// assumes each band has a mirror image at `-f`, which the endpoints do not.
/// The estimate is masked wherever any band lacks a coefficient, which
/// happens within the filter support of the series ends and around dense
/// gaps.
pub fn reconstruct(
    ts: &TimeSeries,
    frequencies: &[f64],
    m: usize,
    k: usize,
) -> Result<Reconstruction> {
    if frequencies.is_empty() {
        return Err(KzpError::InvalidParameter {
            name: "frequencies",
            message: "at least one frequency is required".into(),
        });
    }
    for (i, &f) in frequencies.iter().enumerate() {
        if !f.is_finite() || f <= 0.0 || f >= 0.5 {
            return Err(KzpError::InvalidParameter {
                name: "frequencies",
                message: format!("frequency {f} at position {i} is outside (0, 0.5)"),
            });
        }
        if frequencies[..i].contains(&f) {
            return Err(KzpError::InvalidParameter {
                name: "frequencies",
                message: format!("frequency {f} appears more than once"),
            });
        }
    }
    let n = ts.len();
    let start = ts.start_index();
    let mut sums = vec![0.0; n];
    let mut bands_present = vec![0usize; n];
    let mut components = Vec::with_capacity(frequencies.len());
    for &f in frequencies {
        let band = kzft(ts, m, k, f)?;
        for (t, c) in band.iter() {
            let i = (t - start) as usize;
            let carrier = crate::spectrum::phasor(f * t as f64);
            sums[i] += 2.0 * (c * carrier).re;
            bands_present[i] += 1;
        }
        components.push((f, band));
    }
    let mask: Vec<bool> = bands_present
        .iter()
        .map(|&hits| hits == frequencies.len())
        .collect();
    let estimate = TimeSeries::new(sums, mask, start)?;
    Ok(Reconstruction {
        estimate,
        components,
        warmup: k * (m - 1),
    })
}

/// Pearson correlation between two series over their jointly observed
/// samples.
///
/// The series must cover the same time range; at least three joint samples
/// and nonzero variance on both sides are required.
pub fn fit_metrics(estimate: &TimeSeries, reference: &TimeSeries) -> Result<FitMetrics> {
    if estimate.len() != reference.len() {
        return Err(KzpError::LengthMismatch {
            left: estimate.len(),
            right: reference.len(),
        });
    }
    if estimate.start_index() != reference.start_index() {
        return Err(KzpError::InvalidParameter {
            name: "start_index",
            message: format!(
                "series start at {} and {}, but must be aligned",
                estimate.start_index(),
                reference.start_index()
            ),
        });
    }
    let joint: Vec<(f64, f64)> = estimate
        .values()
        .iter()
        .zip(estimate.mask())
        .zip(reference.values().iter().zip(reference.mask()))
        .filter(|((_, &a), (_, &b))| a && b)
        .map(|((&x, _), (&y, _))| (x, y))
        .collect();
    if joint.len() < 3 {
        return Err(KzpError::InsufficientObservations {
            needed: 3,
            available: joint.len(),
        });
    }
    let n = joint.len() as f64;
    let mean_x = joint.iter().map(|&(x, _)| x).sum::<f64>() / n;
    let mean_y = joint.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for &(x, y) in &joint {
        let dx = x - mean_x;
        let dy = y - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(KzpError::ZeroVariance);
    }
    let r = cov / (var_x * var_y).sqrt();
    Ok(FitMetrics {
        r,
        r_squared: r * r,
        n_scored: joint.len(),
    })
}

/// Writes aligned truth, observation and estimate columns as CSV.
///
/// All three series must share length and start time. Masked samples leave
/// their field empty, so gaps and warmup regions are visible in the file.
pub fn write_reconstruction_csv<P: AsRef<Path>>(
    path: P,
    truth: &TimeSeries,
    observed: &TimeSeries,
    estimate: &TimeSeries,
) -> Result<()> {
    for other in [observed, estimate] {
        if other.len() != truth.len() {
            return Err(KzpError::LengthMismatch {
                left: other.len(),
                right: truth.len(),
            });
        }
        if other.start_index() != truth.start_index() {
            return Err(KzpError::InvalidParameter {
                name: "start_index",
                message: "reconstruction columns must be aligned in time".into(),
            });
        }
    }
    let path = path.as_ref();
    let mut out = String::from("t,truth,observed,estimate\n");
    let field = |ts: &TimeSeries, i: usize| {
        if ts.is_observed(i) {
            format!("{}", ts.values()[i])
        } else {
            String::new()
        }
    };
    for i in 0..truth.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            truth.time_at(i),
            field(truth, i),
            field(observed, i),
            field(estimate, i)
        );
    }
    fs::write(path, out).map_err(|source| KzpError::Io {
        path: path.to_path_buf(),
        source,
    })
}
