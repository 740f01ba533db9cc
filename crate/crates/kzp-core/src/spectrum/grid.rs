//! Uniform frequency grids over `[0, 1/2]` cycles per sample.

use crate::error::{KzpError, Result};

/// Frequencies `j / denominator` for `j = 0, 1, ..., floor(denominator / 2)`.
///
/// The grid covers the nonnegative half of the spectrum of a real series
/// sampled once per time unit, so its last point is the Nyquist frequency
/// when the denominator is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyGrid {
    denominator: usize,
}

impl FrequencyGrid {
    /// Grid with spacing `1 / denominator`.
    pub fn with_denominator(denominator: usize) -> Result<Self> {
        if denominator < 2 {
            return Err(KzpError::InvalidParameter {
                name: "denominator",
                message: format!("must be at least 2, got {denominator}"),
            });
        }
        Ok(Self { denominator })
    }

    /// Grid whose spacing is `step`, which must be the reciprocal of an
    /// integer of at least 2.
    pub fn from_step(step: f64) -> Result<Self> {
        if !step.is_finite() || step <= 0.0 {
            return Err(KzpError::InvalidParameter {
                name: "step",
                message: format!("must be positive and finite, got {step}"),
            });
        }
        let denominator = step.recip().round();
        if denominator < 2.0 || ((denominator * step) - 1.0).abs() > 1e-9 {
            return Err(KzpError::InvalidParameter {
                name: "step",
                message: format!("must be 1/d for an integer d >= 2, got {step}"),
            });
        }
        Self::with_denominator(denominator as usize)
    }

    /// The integer `d` in the spacing `1 / d`.
    pub fn denominator(&self) -> usize {
        self.denominator
    }

    /// Grid spacing in cycles per sample.
    pub fn step(&self) -> f64 {
        1.0 / self.denominator as f64
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.denominator / 2 + 1
    }

    /// Always false; present for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Frequency of the `index`-th grid point.
    pub fn frequency(&self, index: usize) -> f64 {
        index as f64 / self.denominator as f64
    }

    /// Iterates over all grid frequencies in ascending order.
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.frequency(j))
    }

    /// Index of the grid point closest to `frequency`, clamped to the grid.
    pub fn nearest_index(&self, frequency: f64) -> usize {
        let raw = (frequency * self.denominator as f64).round();
        (raw.max(0.0) as usize).min(self.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_denominator_reaches_nyquist() {
        let grid = FrequencyGrid::with_denominator(10).unwrap();
        assert_eq!(grid.len(), 6);
        assert_eq!(grid.frequency(0), 0.0);
        assert_eq!(grid.frequency(5), 0.5);
        assert_eq!(grid.step(), 0.1);
    }

    #[test]
    fn odd_denominator_stops_short_of_nyquist() {
        let grid = FrequencyGrid::with_denominator(5).unwrap();
        assert_eq!(grid.len(), 3);
        let points: Vec<f64> = grid.points().collect();
        assert_eq!(points, vec![0.0, 0.2, 0.4]);
    }

    #[test]
    fn from_step_accepts_exact_reciprocals_only() {
        assert_eq!(
            FrequencyGrid::from_step(0.002).unwrap(),
            FrequencyGrid::with_denominator(500).unwrap()
        );
        assert!(FrequencyGrid::from_step(0.3).is_err());
        assert!(FrequencyGrid::from_step(0.0).is_err());
        assert!(FrequencyGrid::from_step(-0.1).is_err());
        assert!(FrequencyGrid::from_step(f64::NAN).is_err());
        assert!(FrequencyGrid::from_step(1.0).is_err());
    }

    #[test]
    fn nearest_index_rounds_and_clamps() {
        let grid = FrequencyGrid::with_denominator(100).unwrap();
        assert_eq!(grid.nearest_index(0.084), 8);
        assert_eq!(grid.nearest_index(0.086), 9);
        assert_eq!(grid.nearest_index(-0.2), 0);
        assert_eq!(grid.nearest_index(0.9), 50);
    }
}
