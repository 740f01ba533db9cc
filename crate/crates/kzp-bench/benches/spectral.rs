//! Benchmarks for the stages of the detection pipeline.
//!
//! Sizes mirror the study settings: series of a few thousand samples and a
//! width-500 filter. Run with `cargo bench -p kzp-bench`.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kzp_bench::{gappy_two_tone, two_tone};
use kzp_core::{dz_smooth, kz_periodogram, kzft, kzp, raw_periodogram, SmoothMethod};

fn bench_raw_periodogram(c: &mut Criterion) {
    let mut group = c.benchmark_group("raw_periodogram");
    for n in [1000, 5000] {
        let full = two_tone(n);
        group.bench_with_input(BenchmarkId::new("full", n), &full, |b, ts| {
            b.iter(|| raw_periodogram(black_box(ts)).expect("valid series"));
        });
        let gappy = gappy_two_tone(n);
        group.bench_with_input(BenchmarkId::new("gappy", n), &gappy, |b, ts| {
            b.iter(|| raw_periodogram(black_box(ts)).expect("valid series"));
        });
    }
    group.finish();
}

fn bench_kzft(c: &mut Criterion) {
    let series = two_tone(5000);
    c.bench_function("kzft_m500_k3", |b| {
        b.iter(|| kzft(black_box(&series), 500, 3, 0.084).expect("valid call"));
    });
}

fn bench_kz_periodogram(c: &mut Criterion) {
    let mut group = c.benchmark_group("kz_periodogram");
    group.sample_size(20);
    for (n, k) in [(1000, 2), (5000, 3)] {
        let series = two_tone(n);
        group.bench_with_input(
            BenchmarkId::new(format!("m500_k{k}"), n),
            &series,
            |b, ts| {
                b.iter(|| kz_periodogram(black_box(ts), 500, k).expect("valid call"));
            },
        );
    }
    group.finish();
}

fn bench_dz_smooth(c: &mut Criterion) {
    let pg = raw_periodogram(&two_tone(5000)).expect("valid series");
    c.bench_function("dz_smooth_n5000", |b| {
        b.iter(|| dz_smooth(black_box(&pg), 0.05).expect("valid level"));
    });
}

fn bench_full_pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("kzp");
    group.sample_size(20);
    let full = two_tone(5000);
    group.bench_function("full_n5000", |b| {
        b.iter(|| kzp(black_box(&full), 500, 3, 0.05, SmoothMethod::Dz, 3, 2).expect("valid call"));
    });
    let gappy = gappy_two_tone(5000);
    group.bench_function("gappy_n5000", |b| {
        b.iter(|| {
            kzp(black_box(&gappy), 500, 3, 0.05, SmoothMethod::Dz, 3, 2).expect("valid call")
        });
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_raw_periodogram,
    bench_kzft,
    bench_kz_periodogram,
    bench_dz_smooth,
    bench_full_pipeline
);
criterion_main!(benches);
