//! Error types shared across the crate.

use std::path::PathBuf;

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, KzpError>;

/// Unified error type for series handling, spectral estimation and model fitting.
#[derive(Debug, thiserror::Error)]
pub enum KzpError {
    /// A series or spectrum was constructed from zero samples.
    #[error("series must contain at least one sample")]
    EmptySeries,

    /// Parallel slices that must line up sample-for-sample do not.
    #[error("length mismatch: {left} vs {right} samples")]
    LengthMismatch { left: usize, right: usize },

    /// An observed value or derived quantity was NaN or infinite.
    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },

    /// Reading or writing a file failed.
    #[error("io error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A CSV file held a line that could not be interpreted.
    #[error("parse error in {path} at line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Time stamps in a loaded series were not consecutive integers.
    #[error("time column must advance by exactly one per row (line {line})")]
    NonContiguousTime { line: usize },

    /// A file that must supply data contained no rows.
    #[error("no data rows found in {path}")]
    EmptyFile { path: PathBuf },

    /// An operation needed more observed samples than the series provides.
    #[error("not enough observed samples: need {needed}, have {available}")]
    InsufficientObservations { needed: usize, available: usize },

    /// A parameter was outside its documented domain.
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// A signal-to-noise ratio was requested for a noiseless specification.
    #[error("signal-to-noise ratio is undefined for zero noise deviation")]
    InfiniteSnr,

    /// A frequency grid was constructed with no points.
    #[error("frequency grid must contain at least one point")]
    EmptyGrid,

    /// The series is shorter than the filter support it must carry.
    #[error("series of length {len} is shorter than the filter support {support}")]
    SeriesTooShort { len: usize, support: usize },

    /// Every candidate window fell below the minimum coverage threshold.
    #[error("no window reached the minimum observed-sample coverage")]
    NoValidWindows,

    /// The operation requires a fully observed series but the input has gaps.
    #[error("operation does not accept masked samples")]
    MaskedInputUnsupported,

    /// A statistic that divides by the sample variance met a constant series.
    #[error("variance of the observed samples is zero")]
    ZeroVariance,
}
