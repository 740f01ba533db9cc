//! Adaptive spectral analysis built on Kolmogorov-Zurbenko filters.

pub mod adaptive;
pub mod ar;
pub mod error;
pub mod experiments;
pub mod plot;
pub mod reconstruct;
pub mod series;
pub mod simulate;
pub mod spectrum;

pub use adaptive::{
    dz_smooth, dz_smooth_with, kzp, nz_smooth, top_frequencies, KzpResult, SmoothMethod,
    SmoothedPeriodogram, VariationStat,
};
pub use ar::{acf, default_max_order, unexplained_ratio, write_acf_csv, yule_walker, ArModel};
pub use error::{KzpError, Result};
pub use experiments::{
    run_accuracy, run_resolution, run_robustness, run_sensitivity, run_showcase, run_study,
    standard_snr_sweep, write_run_manifest, CellSummary, ExperimentRow, ExperimentTable,
    ScenarioConfig, ShowcaseConfig, ShowcaseReport, Study, MISSING_SEED_SALT,
};
pub use plot::{plot_correlogram, plot_kzp, plot_periodogram, plot_reconstruction};
pub use reconstruct::{
    fit_metrics, reconstruct, write_reconstruction_csv, FitMetrics, Reconstruction,
};
pub use series::{SeriesStats, TimeSeries};
pub use simulate::{generate, inject_missing, snr, SignalComponent, SignalSpec};
pub use spectrum::{
    kz_periodogram, kz_periodogram_oversampled, kzft, raw_periodogram, smooth_fixed,
    window_weights, ComplexSeries, FrequencyGrid, Periodogram, WindowForm,
};
