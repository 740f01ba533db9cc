//! Synthetic signal generation for experiments and tests.
//!
//! Signals are sums of sinusoids plus white Gaussian noise, produced from a
//! fixed seed so every run of an experiment sees the same data. Gaps are
//! introduced separately by [`inject_missing`], which masks samples
//! completely at random with its own seed, so one underlying signal can be
//! degraded to several missingness levels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;

use crate::error::{KzpError, Result};
use crate::series::TimeSeries;

/// One sinusoidal component of a synthetic signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalComponent {
    /// Frequency in cycles per sample, in `[0, 0.5]`.
    pub frequency: f64,
    /// Peak amplitude.
    pub amplitude: f64,
    /// Phase offset in radians.
    pub phase: f64,
}

impl SignalComponent {
    /// Component with the given frequency and amplitude and zero phase.
    pub fn new(frequency: f64, amplitude: f64) -> Self {
        Self {
            frequency,
            amplitude,
            phase: 0.0,
        }
    }
}

/// Full description of a synthetic signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    /// Number of samples.
    pub n: usize,
    /// Sinusoidal components, possibly empty for pure noise.
    pub components: Vec<SignalComponent>,
    /// Standard deviation of the additive Gaussian noise.
    pub noise_sigma: f64,
    /// Seed for the noise generator.
    pub seed: u64,
}

impl SignalSpec {
    /// Spec with the same components and length but no noise.
    ///
    /// Generating it yields exactly the deterministic part of the signal,
    /// which serves as ground truth when scoring reconstructions.
    pub fn noise_free(&self) -> Self {
        Self {
            noise_sigma: 0.0,
            ..self.clone()
        }
    }
}

fn validate_spec(spec: &SignalSpec) -> Result<()> {
    if spec.n == 0 {
        return Err(KzpError::InvalidParameter {
            name: "n",
            message: "sample count must be positive".into(),
        });
    }
    if !spec.noise_sigma.is_finite() || spec.noise_sigma < 0.0 {
        return Err(KzpError::InvalidParameter {
            name: "noise_sigma",
            message: format!("must be finite and nonnegative, got {}", spec.noise_sigma),
        });
    }
    for (i, c) in spec.components.iter().enumerate() {
        if !c.frequency.is_finite() || !(0.0..=0.5).contains(&c.frequency) {
            return Err(KzpError::InvalidParameter {
                name: "frequency",
                message: format!(
                    "component {i} has frequency {} outside [0, 0.5]",
                    c.frequency
                ),
            });
        }
        if !c.amplitude.is_finite() {
            return Err(KzpError::InvalidParameter {
                name: "amplitude",
                message: format!("component {i} has non-finite amplitude"),
            });
        }
        if !c.phase.is_finite() {
            return Err(KzpError::InvalidParameter {
                name: "phase",
                message: format!("component {i} has non-finite phase"),
            });
        }
    }
    Ok(())
}

/// Generates the series described by `spec`.
///
/// Sample `t` (for `t = 0, 1, ..., n-1`) is the sum of
/// `amplitude * sin(2 pi frequency t + phase)` over all components, plus
/// `N(0, noise_sigma^2)` noise from a seeded generator. The result is fully
/// observed.
pub fn generate(spec: &SignalSpec) -> Result<TimeSeries> {
    validate_spec(spec)?;
    let mut values = Vec::with_capacity(spec.n);
    for t in 0..spec.n {
        let t = t as f64;
        let mut x = 0.0;
        for c in &spec.components {
            x += c.amplitude * (TAU * c.frequency * t + c.phase).sin();
        }
        values.push(x);
    }
    if spec.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        for value in &mut values {
            let z: f64 = rng.sample(StandardNormal);
            *value += spec.noise_sigma * z;
        }
    }
    TimeSeries::from_values(values)
}

/// Signal-to-noise ratio of a spec: the sum of squared component amplitudes
/// divided by the noise variance.
///
/// Fails with [`KzpError::InfiniteSnr`] when the spec has no noise.
pub fn snr(spec: &SignalSpec) -> Result<f64> {
    validate_spec(spec)?;
    if spec.noise_sigma == 0.0 {
        return Err(KzpError::InfiniteSnr);
    }
    let power: f64 = spec
        .components
        .iter()
        .map(|c| c.amplitude * c.amplitude)
        .sum();
    Ok(power / (spec.noise_sigma * spec.noise_sigma))
}

/// Masks each observed sample independently with probability `fraction`.
///
/// Already masked samples stay masked. The draw order is fixed (one uniform
/// draw per time step, masked or not), so a given seed removes the same time
/// stamps regardless of any prior masking.
pub fn inject_missing(ts: &TimeSeries, fraction: f64, seed: u64) -> Result<TimeSeries> {
    if !fraction.is_finite() || !(0.0..=1.0).contains(&fraction) {
        return Err(KzpError::InvalidParameter {
            name: "fraction",
            message: format!("must lie in [0, 1], got {fraction}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mask = Vec::with_capacity(ts.len());
    for &observed in ts.mask() {
        let drop = rng.random::<f64>() < fraction;
        mask.push(observed && !drop);
    }
    TimeSeries::new(ts.values().to_vec(), mask, ts.start_index())
}
