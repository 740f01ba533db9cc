//! Classical periodogram of a possibly gappy series.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{KzpError, Result};
use crate::series::TimeSeries;
use crate::spectrum::FrequencyGrid;

/// Spectral intensities over a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    /// Grid the intensities are evaluated on.
    pub grid: FrequencyGrid,
    /// One nonnegative intensity per grid point.
    pub intensity: Vec<f64>,
    /// How many samples or windows contributed to the estimate.
    pub n_used: usize,
}

impl Periodogram {
    /// Builds a periodogram, checking that the intensities cover the grid
    /// exactly and are finite and nonnegative.
    pub fn new(grid: FrequencyGrid, intensity: Vec<f64>, n_used: usize) -> Result<Self> {
        if intensity.len() != grid.len() {
            return Err(KzpError::LengthMismatch {
                left: intensity.len(),
                right: grid.len(),
            });
        }
        for (index, &value) in intensity.iter().enumerate() {
            if !value.is_finite() {
                return Err(KzpError::NonFiniteValue { index });
            }
            if value < 0.0 {
                return Err(KzpError::InvalidParameter {
                    name: "intensity",
                    message: format!("negative intensity {value} at index {index}"),
                });
            }
        }
        Ok(Self {
            grid,
            intensity,
            n_used,
        })
    }

    /// Writes the spectrum as `frequency,intensity` rows under a header.
    pub fn save_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::from("frequency,intensity\n");
        for (f, i) in self.grid.points().zip(&self.intensity) {
            let _ = writeln!(out, "{f},{i}");
        }
        fs::write(path, out).map_err(|source| KzpError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Compensated accumulator, so long demodulated sums keep full precision.
#[derive(Clone, Copy, Default)]
pub(crate) struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum
    }
}

/// Unit phasor `exp(i 2 pi turns)`.
///
/// The argument is reduced with `fract` before scaling by two pi, so large
/// time-frequency products lose no phase accuracy.
pub(crate) fn phasor(turns: f64) -> Complex64 {
    let angle = TAU * turns.fract();
    let (sin, cos) = angle.sin_cos();
    Complex64::new(cos, sin)
}

/// Raw periodogram on the Fourier grid of the series length.
///
/// The observed mean is removed first, then for each frequency `j / n`
/// (for `j` up to `n / 2`) the demodulated sum runs over observed samples
/// only:
///
/// ```text
/// I(f) = | sum over observed t of (x_t - mean) exp(-i 2 pi f t) |^2 / (2 pi n)
/// ```
///
/// The divisor uses the full series length `n`, so masking samples lowers
/// intensities in proportion to the lost squared amplitude rather than
/// rescaling the spectrum. At least two observed samples are required.
pub fn raw_periodogram(ts: &TimeSeries) -> Result<Periodogram> {
    let n = ts.len();
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
    let grid = FrequencyGrid::with_denominator(n)?;
    let scale = 1.0 / (TAU * n as f64);
    let mut intensity = Vec::with_capacity(grid.len());
    for f in grid.points() {
        let step = phasor(-f);
        let mut w = Complex64::new(1.0, 0.0);
        let mut re = Kahan::default();
        let mut im = Kahan::default();
        for (r, (&d, &observed)) in demeaned.iter().zip(ts.mask()).enumerate() {
            if r % 256 == 0 {
                w = phasor(-f * r as f64);
            }
            if observed {
                re.add(d * w.re);
                im.add(d * w.im);
            }
            w *= step;
        }
        let (re, im) = (re.value(), im.value());
        intensity.push((re * re + im * im) * scale);
    }
    Periodogram::new(grid, intensity, n_observed)
}
