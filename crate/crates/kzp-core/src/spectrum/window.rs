//! Fixed spectral windows and fixed-width periodogram smoothing.

use std::fmt;
use std::str::FromStr;

use crate::error::{KzpError, Result};
use crate::spectrum::periodogram::Periodogram;

/// Shape of a fixed smoothing window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowForm {
    /// Triangular taper `1 - |s| / (A + 1)`.
    Bartlett,
    /// Gaussian taper `exp(-9 s^2 / (2 A^2))`.
    Gaussian,
    /// Piecewise cubic taper in `x = |s| / (A + 1)`: `1 - 6x^2 + 6x^3` up to
    /// `x = 1/2`, then `2 (1 - x)^3`.
    Parzen,
    /// Raised cosine taper `0.54 + 0.46 cos(pi s / A)`.
    TukeyHamming,
}

impl fmt::Display for WindowForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            WindowForm::Bartlett => "bartlett",
            WindowForm::Gaussian => "gaussian",
            WindowForm::Parzen => "parzen",
            WindowForm::TukeyHamming => "tukey-hamming",
        };
        f.write_str(name)
    }
}

impl FromStr for WindowForm {
    type Err = KzpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bartlett" => Ok(WindowForm::Bartlett),
            "gaussian" => Ok(WindowForm::Gaussian),
            "parzen" => Ok(WindowForm::Parzen),
            "tukey-hamming" | "tukey_hamming" => Ok(WindowForm::TukeyHamming),
            other => Err(KzpError::InvalidParameter {
                name: "window",
                message: format!(
                    "unknown window {other:?}, expected bartlett, gaussian, parzen or tukey-hamming"
                ),
            }),
        }
    }
}

/// Normalized weights of a window with half width `half_width`.
///
/// The result has `2 * half_width + 1` entries that sum to one, with the
/// window center in the middle. A half width of zero gives the identity
/// window `[1.0]` for every form.
pub fn window_weights(form: WindowForm, half_width: usize) -> Vec<f64> {
    if half_width == 0 {
        return vec![1.0];
    }
    let a = half_width as f64;
    let mut weights = Vec::with_capacity(2 * half_width + 1);
    for offset in -(half_width as isize)..=(half_width as isize) {
        let s = offset as f64;
        let w = match form {
            WindowForm::Bartlett => 1.0 - s.abs() / (a + 1.0),
            WindowForm::Gaussian => (-9.0 * s * s / (2.0 * a * a)).exp(),
            WindowForm::Parzen => {
                let x = s.abs() / (a + 1.0);
                if x <= 0.5 {
                    1.0 - 6.0 * x * x + 6.0 * x * x * x
                } else {
                    2.0 * (1.0 - x).powi(3)
                }
            }
            WindowForm::TukeyHamming => 0.54 + 0.46 * (std::f64::consts::PI * s / a).cos(),
        };
        weights.push(w);
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    weights
}

/// Index into a slice of length `len` with reflection at both ends.
///
/// Positions beyond an edge fold back without repeating the edge sample
/// twice, so `-1` maps to `1` and `len` maps to `len - 2`. Valid for
/// `-(len - 1) <= index <= 2 * (len - 1)`.
pub(crate) fn reflect_index(index: isize, len: usize) -> usize {
    let last = (len - 1) as isize;
    let folded = if index < 0 {
        -index
    } else if index > last {
        2 * last - index
    } else {
        index
    };
    folded as usize
}

/// Smooths a periodogram with a fixed window of the given form.
///
/// Each output intensity is the weighted average of the `2 * half_width + 1`
/// neighboring intensities, with reflection past the ends of the grid. The
/// half width must be smaller than the number of grid points.
pub fn smooth_fixed(
    periodogram: &Periodogram,
    form: WindowForm,
    half_width: usize,
) -> Result<Periodogram> {
    let len = periodogram.intensity.len();
    if half_width >= len {
        return Err(KzpError::InvalidParameter {
            name: "half_width",
            message: format!("must be below the grid length {len}, got {half_width}"),
        });
    }
    let weights = window_weights(form, half_width);
    let mut smoothed = Vec::with_capacity(len);
    for j in 0..len {
        let mut acc = 0.0;
        for (w_index, w) in weights.iter().enumerate() {
            let offset = w_index as isize - half_width as isize;
            acc += w * periodogram.intensity[reflect_index(j as isize + offset, len)];
        }
        smoothed.push(acc);
    }
    Periodogram::new(periodogram.grid, smoothed, periodogram.n_used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::FrequencyGrid;

    const FORMS: [WindowForm; 4] = [
        WindowForm::Bartlett,
        WindowForm::Gaussian,
        WindowForm::Parzen,
        WindowForm::TukeyHamming,
    ];

    #[test]
    fn weights_are_normalized_symmetric_and_peaked() {
        for form in FORMS {
            for half_width in 0..6 {
                let w = window_weights(form, half_width);
                assert_eq!(w.len(), 2 * half_width + 1);
                let sum: f64 = w.iter().sum();
                assert!((sum - 1.0).abs() < 1e-12, "{form} sum {sum}");
                for i in 0..w.len() {
                    assert!(
                        (w[i] - w[w.len() - 1 - i]).abs() < 1e-15,
                        "{form} asymmetric"
                    );
                    assert!(w[i] <= w[half_width] + 1e-15, "{form} not peaked at center");
                    assert!(w[i] > 0.0, "{form} weight not positive");
                }
            }
        }
    }

    #[test]
    fn zero_half_width_is_identity_window() {
        for form in FORMS {
            assert_eq!(window_weights(form, 0), vec![1.0]);
        }
    }

    #[test]
    fn bartlett_weights_match_hand_computation() {
        let w = window_weights(WindowForm::Bartlett, 2);
        let expected = [1.0 / 9.0, 2.0 / 9.0, 3.0 / 9.0, 2.0 / 9.0, 1.0 / 9.0];
        for (got, want) in w.iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn parzen_weights_match_hand_computation() {
        let raw = [0.031_25, 0.25, 0.718_75, 1.0, 0.718_75, 0.25, 0.031_25];
        let total: f64 = raw.iter().sum();
        let w = window_weights(WindowForm::Parzen, 3);
        for (got, want) in w.iter().zip(raw) {
            assert!((got - want / total).abs() < 1e-15);
        }
    }

    #[test]
    fn tukey_hamming_edge_weight_matches_hand_computation() {
        let w = window_weights(WindowForm::TukeyHamming, 1);
        let total = 1.0 + 2.0 * 0.08;
        assert!((w[0] - 0.08 / total).abs() < 1e-12);
        assert!((w[1] - 1.0 / total).abs() < 1e-12);
    }

    #[test]
    fn window_names_round_trip() {
        for form in FORMS {
            let parsed: WindowForm = form.to_string().parse().unwrap();
            assert_eq!(parsed, form);
        }
        assert!("TUKEY_HAMMING".parse::<WindowForm>().is_ok());
        assert!("hann".parse::<WindowForm>().is_err());
    }

    #[test]
    fn reflection_folds_without_repeating_edges() {
        assert_eq!(reflect_index(-1, 5), 1);
        assert_eq!(reflect_index(-4, 5), 4);
        assert_eq!(reflect_index(0, 5), 0);
        assert_eq!(reflect_index(4, 5), 4);
        assert_eq!(reflect_index(5, 5), 3);
        assert_eq!(reflect_index(8, 5), 0);
    }

    fn toy_periodogram(intensity: Vec<f64>) -> Periodogram {
        let grid = FrequencyGrid::with_denominator(2 * (intensity.len() - 1)).unwrap();
        Periodogram::new(grid, intensity, 10).unwrap()
    }

    #[test]
    fn smoothing_preserves_constants() {
        let pg = toy_periodogram(vec![2.5; 9]);
        for form in FORMS {
            let sm = smooth_fixed(&pg, form, 3).unwrap();
            for v in &sm.intensity {
                assert!((v - 2.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn smoothing_reflects_at_boundaries() {
        let pg = toy_periodogram(vec![4.0, 1.0, 0.0, 0.0, 0.0]);
        let sm = smooth_fixed(&pg, WindowForm::Bartlett, 1).unwrap();
        let w = window_weights(WindowForm::Bartlett, 1);
        let expected0 = w[0] * 1.0 + w[1] * 4.0 + w[2] * 1.0;
        assert!((sm.intensity[0] - expected0).abs() < 1e-12);
        let expected4 = w[0] * 0.0 + w[1] * 0.0 + w[2] * 0.0;
        assert!((sm.intensity[4] - expected4).abs() < 1e-12);
    }

    #[test]
    fn zero_width_smoothing_is_identity() {
        let pg = toy_periodogram(vec![3.0, 1.0, 4.0, 1.0, 5.0]);
        let sm = smooth_fixed(&pg, WindowForm::Gaussian, 0).unwrap();
        assert_eq!(sm.intensity, pg.intensity);
    }

    #[test]
    fn oversized_half_width_is_rejected() {
        let pg = toy_periodogram(vec![1.0, 2.0, 3.0]);
        assert!(smooth_fixed(&pg, WindowForm::Bartlett, 3).is_err());
    }
}
