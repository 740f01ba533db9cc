//! Acceptance gate: every release-blocking requirement, one test per
//! criterion. Each test prints a single summary line with the measured
//! numbers; a failed assertion marks the criterion failed.

use std::f64::consts::TAU;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use kzp_core::{
    dz_smooth, generate, inject_missing, kzp, nz_smooth, raw_periodogram, reconstruct,
    run_accuracy, run_resolution, run_robustness, run_sensitivity, run_showcase, top_frequencies,
    window_weights, FrequencyGrid, Periodogram, ScenarioConfig, ShowcaseConfig, SignalComponent,
    SignalSpec, SmoothMethod, Study, TimeSeries, WindowForm,
};

fn random_series(rng: &mut ChaCha8Rng, masked: bool) -> TimeSeries {
    let n = rng.random_range(16..=256);
    let values: Vec<f64> = (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mask: Vec<bool> = if masked {
        loop {
            let mask: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < 0.7).collect();
            if mask.iter().filter(|&&b| b).count() >= 2 {
                break mask;
            }
        }
    } else {
        vec![true; n]
    };
    TimeSeries::new(values, mask, 0).unwrap()
}

fn oracle_intensity(series: &TimeSeries) -> Vec<f64> {
    let n = series.len();
    let observed: Vec<(usize, f64)> = (0..n)
        .filter(|&i| series.is_observed(i))
        .map(|i| (i, series.values()[i]))
        .collect();
    let mean = observed.iter().map(|(_, v)| v).sum::<f64>() / observed.len() as f64;
    let grid_len = n / 2 + 1;
    (0..grid_len)
        .map(|j| {
            let f = j as f64 / n as f64;
            let mut re = 0.0;
            let mut im = 0.0;
            for &(t, v) in &observed {
                let angle = TAU * f * t as f64;
                re += (v - mean) * angle.cos();
                im -= (v - mean) * angle.sin();
            }
            (re * re + im * im) / (TAU * n as f64)
        })
        .collect()
}

#[test]
fn criterion_1_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let series = random_series(&mut rng, case % 2 == 1);
        let fast = raw_periodogram(&series).unwrap();
        let oracle = oracle_intensity(&series);
        assert_eq!(fast.intensity.len(), oracle.len());
        let peak = oracle.iter().cloned().fold(f64::MIN, f64::max).max(1e-300);
        for (a, b) in fast.intensity.iter().zip(&oracle) {
            worst = worst.max((a - b).abs() / peak);
        }
    }
    let elapsed = start.elapsed();
    assert!(worst < 1e-10, "worst relative deviation {worst:e}");
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "criterion 1 (oracle equivalence): PASS, 200 series, worst relative deviation {worst:.2e}, {elapsed:.2?}"
    );
}

#[test]
fn criterion_2_parseval_mass() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let series = random_series(&mut rng, false);
        let n = series.len();
        let stats = series.stats().unwrap();
        let periodogram = raw_periodogram(&series).unwrap();
        let mut mass = 0.0;
        for (j, &intensity) in periodogram.intensity.iter().enumerate() {
            let unique = j == 0 || (n % 2 == 0 && j == n / 2);
            mass += if unique { intensity } else { 2.0 * intensity };
        }
        let mean_power = stats.variance;
        let relative = (mass * TAU / n as f64 - mean_power).abs() / mean_power;
        worst = worst.max(relative);
    }
    assert!(worst < 1e-8, "worst relative error {worst:e}");
    println!(
        "criterion 2 (periodogram mass equals mean power): PASS, 100 series, worst relative error {worst:.2e}"
    );
}

#[test]
fn criterion_3_noiseless_recovery_across_the_grid() {
    let m = 500;
    let n = 5000;
    for j in 1..=(m / 2 - 1) {
        let frequency = j as f64 / m as f64;
        let spec = SignalSpec {
            n,
            components: vec![SignalComponent::new(frequency, 1.0)],
            noise_sigma: 0.0,
            seed: 0,
        };
        let series = generate(&spec).unwrap();
        let result = kzp(&series, m, 3, 0.05, SmoothMethod::Dz, 3, 1).unwrap();
        let argmax = result
            .raw
            .intensity
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(argmax, j, "raw argmax at frequency {frequency}");
        assert_eq!(
            result.top_frequencies,
            vec![frequency],
            "pipeline report at frequency {frequency}"
        );
    }
    println!(
        "criterion 3 (noiseless on-grid recovery): PASS, argmax exact at all {} interior grid frequencies",
        m / 2 - 1
    );
}

#[test]
fn criterion_4_sensitivity_at_the_limit() {
    let start = Instant::now();
    let mut config = ScenarioConfig::standard(Study::Sensitivity);
    config.n_values = vec![5000];
    config.dz_levels = vec![0.05];
    config.snr_values = vec![0.045];
    let table = run_sensitivity(&config).unwrap();
    let rate = table.cells()[0].detection_rate();
    let elapsed = start.elapsed();
    assert!(rate >= 0.7, "detection rate {rate}");
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    println!(
        "criterion 4 (sensitivity at signal-to-noise 0.045): PASS, detection rate {rate:.2} over 20 replicates, {elapsed:.2?}"
    );
}

#[test]
fn criterion_5_accuracy_per_cell() {
    let mut config = ScenarioConfig::standard(Study::Accuracy);
    config.n_values = vec![5000];
    let table = run_accuracy(&config).unwrap();
    let cells = table.cells();
    assert_eq!(cells.len(), 6);
    let mut summary = String::new();
    for cell in &cells {
        let rate = cell.detection_rate();
        summary.push_str(&format!(
            " [dz {} f {} rate {rate:.2}]",
            cell.dz, cell.true_frequencies[0]
        ));
        assert!(
            rate >= 0.8,
            "cell dz {} f {} rate {rate}",
            cell.dz,
            cell.true_frequencies[0]
        );
    }
    println!("criterion 5 (accuracy within one grid step): PASS,{summary}");
}

#[test]
fn criterion_6_resolution_and_merging() {
    let mut config = ScenarioConfig::standard(Study::Resolution);
    config.n_values = vec![5000];
    config.dz_levels = vec![0.05];
    config.second_frequencies = vec![0.030, 0.039];
    let table = run_resolution(&config).unwrap();
    let cells = table.cells();
    let resolved = cells
        .iter()
        .find(|c| c.true_frequencies[1] == 0.030)
        .unwrap()
        .detection_rate();
    let merged = 1.0
        - cells
            .iter()
            .find(|c| c.true_frequencies[1] == 0.039)
            .unwrap()
            .detection_rate();
    assert!(
        resolved >= 0.9,
        "pair (0.040, 0.030) resolved rate {resolved}"
    );
    assert!(merged >= 0.5, "pair (0.040, 0.039) merged rate {merged}");
    println!(
        "criterion 6 (resolution): PASS, separated pair resolved {resolved:.2}, close pair merged {merged:.2}"
    );
}

#[test]
fn criterion_7_robustness_to_missing_data() {
    let mut config = ScenarioConfig::standard(Study::Robustness);
    config.missing_fractions = vec![0.5, 0.7];
    let table = run_robustness(&config).unwrap();
    let cells = table.cells();
    let rate_of = |n: usize, dz: f64, missing: f64| {
        cells
            .iter()
            .find(|c| c.n == n && c.dz == dz && c.missing == missing)
            .unwrap()
            .detection_rate()
    };
    let half_missing = rate_of(5000, 0.05, 0.5);
    assert!(half_missing >= 0.7, "rate {half_missing} at half missing");
    let short_half = rate_of(1000, 0.05, 0.5);
    let short_deep = rate_of(1000, 0.05, 0.7);
    assert!(
        short_deep < short_half,
        "short-series rate did not degrade: {short_half} at half missing, {short_deep} at seventy percent"
    );
    println!(
        "criterion 7 (missing-data robustness): PASS, rate {half_missing:.2} at half missing, short series degrade {short_half:.2} -> {short_deep:.2}"
    );
}

#[test]
fn criterion_8_showcase_end_to_end() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = ShowcaseConfig::standard(dir.path().join("showcase"));
    let report = run_showcase(&config).unwrap();
    let elapsed = start.elapsed();
    let mut found = report.top_frequencies.clone();
    found.sort_by(f64::total_cmp);
    assert_eq!(found, vec![0.084, 0.098]);
    assert!(
        report.fit.r_squared >= 0.93,
        "reconstruction r-squared {}",
        report.fit.r_squared
    );
    assert!(
        report.missing_fit.r_squared >= 0.88,
        "gapped reconstruction r-squared {}",
        report.missing_fit.r_squared
    );
    assert!(
        report.ar_unexplained >= 0.90,
        "residual model leaves {} unexplained",
        report.ar_unexplained
    );
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "criterion 8 (showcase): PASS, top {:?}, r-squared {:.3}, gapped r-squared {:.3}, unexplained {:.3}, {elapsed:.2?}",
        found, report.fit.r_squared, report.missing_fit.r_squared, report.ar_unexplained
    );
}

#[test]
fn criterion_9_property_suites() {
    const CASES: u32 = 210;
    let config = PropConfig {
        cases: CASES,
        failure_persistence: None,
        ..PropConfig::default()
    };

    let mut runner = TestRunner::new(config.clone());
    runner
        .run(
            &(
                prop::sample::select(vec![
                    WindowForm::Bartlett,
                    WindowForm::Gaussian,
                    WindowForm::Parzen,
                    WindowForm::TukeyHamming,
                ]),
                0usize..=150,
            ),
            |(form, half_width)| {
                let weights = window_weights(form, half_width);
                let sum: f64 = weights.iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-12);
                Ok(())
            },
        )
        .unwrap();

    let toy = |intensity: Vec<f64>| {
        let grid = FrequencyGrid::with_denominator(2 * (intensity.len() - 1)).unwrap();
        Periodogram::new(grid, intensity, 1).unwrap()
    };

    let mut runner = TestRunner::new(config.clone());
    runner
        .run(
            &(
                prop::collection::vec(0.0f64..1e6, 3..120),
                0.001f64..=1.0,
                0.001f64..=1.0,
            ),
            |(intensity, first, second)| {
                let (lo, hi) = if first <= second {
                    (first, second)
                } else {
                    (second, first)
                };
                let periodogram = toy(intensity);
                let narrow = dz_smooth(&periodogram, lo).unwrap();
                let wide = dz_smooth(&periodogram, hi).unwrap();
                for (a, b) in narrow.half_widths.iter().zip(&wide.half_widths) {
                    prop_assert!(a <= b);
                }
                Ok(())
            },
        )
        .unwrap();

    let mut runner = TestRunner::new(config.clone());
    runner
        .run(
            &(
                prop::collection::vec(0.0f64..1.0, 5..120),
                any::<prop::sample::Index>(),
                0.001f64..=0.9,
            ),
            |(base, spike_at, level)| {
                let len = base.len();
                let index = 1 + spike_at.index(len - 2);
                let rest: f64 = base
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != index)
                    .map(|(_, v)| v * v)
                    .sum();
                let mut intensity = base;
                intensity[index] = 10.0 * rest.sqrt() + 1.0;
                let periodogram = toy(intensity);
                let smoothed = dz_smooth(&periodogram, level).unwrap();
                let found = top_frequencies(&smoothed, 1, 6);
                prop_assert_eq!(found.len(), 1);
                prop_assert!((found[0] - periodogram.grid.frequency(index)).abs() < 1e-6);
                Ok(())
            },
        )
        .unwrap();

    let mut runner = TestRunner::new(config.clone());
    runner
        .run(
            &(
                prop::collection::vec(0.0f64..1e3, 3..120),
                -9.0f64..9.0,
                0.001f64..=1.0,
            ),
            |(intensity, exponent, level)| {
                let scale = 10f64.powf(exponent);
                let rescaled: Vec<f64> = intensity.iter().map(|v| v * scale).collect();
                let original = nz_smooth(&toy(intensity), level).unwrap();
                let scaled = nz_smooth(&toy(rescaled), level).unwrap();
                prop_assert_eq!(&original.half_widths, &scaled.half_widths);
                Ok(())
            },
        )
        .unwrap();

    let mut runner = TestRunner::new(config);
    runner
        .run(
            &(
                any::<u64>(),
                80usize..140,
                5usize..10,
                1usize..=2,
                0.05f64..0.45,
                0.05f64..0.45,
            ),
            |(seed, n, m, k, f1, f2)| {
                prop_assume!((f1 - f2).abs() > 1e-3);
                let spec = SignalSpec {
                    n,
                    components: vec![SignalComponent::new(f1, 1.0), SignalComponent::new(f2, 0.5)],
                    noise_sigma: 0.3,
                    seed,
                };
                let series = inject_missing(&generate(&spec).unwrap(), 0.05, seed ^ 1).unwrap();
                let only_first = reconstruct(&series, &[f1], m, k).unwrap();
                let only_second = reconstruct(&series, &[f2], m, k).unwrap();
                let both = reconstruct(&series, &[f1, f2], m, k).unwrap();
                for i in 0..n {
                    if both.estimate.is_observed(i) {
                        let summed =
                            only_first.estimate.values()[i] + only_second.estimate.values()[i];
                        let combined = both.estimate.values()[i];
                        prop_assert!((combined - summed).abs() <= 1e-9 * (1.0 + combined.abs()));
                    }
                }
                Ok(())
            },
        )
        .unwrap();

    println!(
        "criterion 9 (property suites): PASS, 5 properties x {CASES} cases = {} cases",
        5 * CASES
    );
}
