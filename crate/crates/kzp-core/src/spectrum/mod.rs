//! Spectral estimators: frequency grids, the raw periodogram, fixed-window
//! smoothing and the Kolmogorov-Zurbenko Fourier transform family.

mod grid;
mod kzft;
mod periodogram;
pub(crate) mod window;

pub use grid::FrequencyGrid;
pub use kzft::{kz_periodogram, kz_periodogram_oversampled, kzft, ComplexSeries};
pub use periodogram::{raw_periodogram, Periodogram};
pub use window::{smooth_fixed, window_weights, WindowForm};

pub(crate) use periodogram::phasor;
