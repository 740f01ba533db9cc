//! Shared fixtures for the benchmark suite.

use kzp_core::{generate, inject_missing, SignalComponent, SignalSpec, TimeSeries};

/// A two-tone series in moderate noise, the shape most benchmarks care about.
pub fn two_tone(n: usize) -> TimeSeries {
    let spec = SignalSpec {
        n,
        components: vec![
            SignalComponent::new(0.084, 1.0),
            SignalComponent::new(0.098, 1.5),
        ],
        noise_sigma: 4.0,
        seed: 42,
    };
    generate(&spec).expect("valid spec")
}

/// The same series with half the samples removed at random.
pub fn gappy_two_tone(n: usize) -> TimeSeries {
    inject_missing(&two_tone(n), 0.5, 7).expect("valid fraction")
}
