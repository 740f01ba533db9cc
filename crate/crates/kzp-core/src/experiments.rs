//! Seeded Monte-Carlo studies of detection limits, plus an end-to-end demo.
//!
//! Every study runs the same loop: simulate a signal, optionally punch
//! holes in it, run the full detection pipeline, and record whether the
//! reported frequencies land within tolerance of the truth. Seeds are
//! derived deterministically from a base seed and a global row counter,
//! so identical configurations produce byte-identical output tables.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::adaptive::{kzp, SmoothMethod};
use crate::ar::{acf, unexplained_ratio, write_acf_csv, yule_walker};
use crate::error::{KzpError, Result};
use crate::plot::{plot_correlogram, plot_kzp, plot_periodogram, plot_reconstruction};
use crate::reconstruct::{fit_metrics, reconstruct, write_reconstruction_csv, FitMetrics};
use crate::series::TimeSeries;
use crate::simulate::{generate, inject_missing, SignalComponent, SignalSpec};
use crate::spectrum::raw_periodogram;

/// XOR salt separating the gap-placement stream from the noise stream.
pub const MISSING_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// The four Monte-Carlo study families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Study {
    /// Lowest signal-to-noise ratio at which a single tone is still found.
    Sensitivity,
    /// Recovery of on-grid and off-grid frequencies across the band.
    Accuracy,
    /// Separation of two close tones as their spacing shrinks.
    Resolution,
    /// Detection under increasing fractions of missing observations.
    Robustness,
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Study::Sensitivity => "sensitivity",
            Study::Accuracy => "accuracy",
            Study::Resolution => "resolution",
            Study::Robustness => "robustness",
        };
        f.write_str(name)
    }
}

impl FromStr for Study {
    type Err = KzpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sensitivity" => Ok(Study::Sensitivity),
            "accuracy" => Ok(Study::Accuracy),
            "resolution" => Ok(Study::Resolution),
            "robustness" => Ok(Study::Robustness),
            other => Err(KzpError::InvalidParameter {
                name: "study",
                message: format!(
                    "unknown study {other:?}, expected sensitivity, accuracy, resolution, or robustness"
                ),
            }),
        }
    }
}

/// Full parameterization of one study run.
///
/// [`ScenarioConfig::standard`] reproduces the published sweeps; individual
/// fields can be overridden for smaller or different experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub study: Study,
    /// Series lengths to sweep.
    pub n_values: Vec<usize>,
    /// Smoothing levels to sweep.
    pub dz_levels: Vec<f64>,
    /// Filter width.
    pub m: usize,
    /// Requested filter iterations; reduced per length when the support
    /// would not fit (see [`ScenarioConfig::k_for`]).
    pub k: usize,
    /// Noise standard deviation.
    pub noise_sigma: f64,
    /// Base seed; row seeds are `base_seed ^ row_index`.
    pub base_seed: u64,
    /// Replicates per cell.
    pub replicates: usize,
    pub method: SmoothMethod,
    /// Decimal places for reported frequencies.
    pub digits: u32,
    /// Target frequency for the sensitivity and robustness studies, and
    /// the first tone of each resolution pair.
    pub signal_frequency: f64,
    /// Signal-to-noise ratios for the sensitivity sweep. Leave empty to
    /// use the standard sweep attached to each smoothing level.
    pub snr_values: Vec<f64>,
    /// Frequencies probed by the accuracy study.
    pub accuracy_frequencies: Vec<f64>,
    pub accuracy_amplitude: f64,
    /// Second tones paired with `signal_frequency` in the resolution study.
    pub second_frequencies: Vec<f64>,
    /// Amplitude of both tones in the resolution study.
    pub resolution_amplitude: f64,
    /// Missing-data fractions for the robustness study.
    pub missing_fractions: Vec<f64>,
    /// Signal-to-noise ratio per smoothing level for the robustness study,
    /// parallel to `dz_levels`.
    pub robustness_snr: Vec<f64>,
}

impl ScenarioConfig {
    /// The published configuration for `study`.
    pub fn standard(study: Study) -> Self {
        ScenarioConfig {
            study,
            n_values: vec![5000, 1000],
            dz_levels: vec![0.05, 0.01],
            m: 500,
            k: 3,
            noise_sigma: 16.0,
            base_seed: 24,
            replicates: 20,
            method: SmoothMethod::Dz,
            digits: 3,
            signal_frequency: 0.040,
            snr_values: Vec::new(),
            accuracy_frequencies: vec![0.400, 0.440, 0.444],
            accuracy_amplitude: 2.0,
            second_frequencies: vec![0.030, 0.033, 0.036, 0.037, 0.038, 0.039],
            resolution_amplitude: 8.0,
            missing_fractions: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7],
            robustness_snr: vec![0.055, 0.015],
        }
    }

    /// Iterations actually used for a series of length `n`: the requested
    /// `k` reduced until the filter support `k(m-1)+1` fits, floored at 1.
    pub fn k_for(&self, n: usize) -> usize {
        if n <= 1 || self.m <= 1 {
            return 1;
        }
        self.k.min((n - 1) / (self.m - 1)).max(1)
    }

    fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(invalid(
                "n_values",
                "at least one series length is required",
            ));
        }
        if self.dz_levels.is_empty() {
            return Err(invalid(
                "dz_levels",
                "at least one smoothing level is required",
            ));
        }
        if self.replicates == 0 {
            return Err(invalid("replicates", "at least one replicate is required"));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma > 0.0) {
            return Err(invalid(
                "noise_sigma",
                "studies require a positive noise level",
            ));
        }
        match self.study {
            Study::Sensitivity => {}
            Study::Accuracy => {
                if self.accuracy_frequencies.is_empty() {
                    return Err(invalid(
                        "accuracy_frequencies",
                        "at least one probe frequency is required",
                    ));
                }
            }
            Study::Resolution => {
                if self.second_frequencies.is_empty() {
                    return Err(invalid(
                        "second_frequencies",
                        "at least one second tone is required",
                    ));
                }
            }
            Study::Robustness => {
                if self.missing_fractions.is_empty() {
                    return Err(invalid(
                        "missing_fractions",
                        "at least one missing fraction is required",
                    ));
                }
                if self.robustness_snr.len() != self.dz_levels.len() {
                    return Err(invalid(
                        "robustness_snr",
                        "one signal-to-noise ratio per smoothing level is required",
                    ));
                }
            }
        }
        Ok(())
    }

    fn snr_sweep(&self, dz: f64) -> Result<Vec<f64>> {
        if !self.snr_values.is_empty() {
            return Ok(self.snr_values.clone());
        }
        standard_snr_sweep(dz).ok_or_else(|| {
            invalid(
                "snr_values",
                format!("no standard sweep for smoothing level {dz}, supply snr_values"),
            )
        })
    }
}

fn invalid(name: &'static str, message: impl Into<String>) -> KzpError {
    KzpError::InvalidParameter {
        name,
        message: message.into(),
    }
}

/// Standard signal-to-noise sweep attached to a smoothing level: eight
/// descending values ending where detection collapses.
pub fn standard_snr_sweep(dz: f64) -> Option<Vec<f64>> {
    let thousandths: std::ops::RangeInclusive<u32> = if dz == 0.05 {
        45..=52
    } else if dz == 0.01 {
        10..=17
    } else {
        return None;
    };
    Some(thousandths.rev().map(|v| f64::from(v) / 1000.0).collect())
}

/// One simulated replicate and its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub n: usize,
    pub dz: f64,
    pub snr: f64,
    pub missing: f64,
    pub true_frequencies: Vec<f64>,
    pub replicate: usize,
    pub seed: u64,
    pub k_used: usize,
    /// Frequencies the pipeline reported, best first. Empty when the
    /// replicate produced no usable windows.
    pub observed: Vec<f64>,
    /// Whether every true frequency was matched within tolerance.
    pub hit: bool,
}

/// Detection rate aggregated over the replicates of one parameter cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub n: usize,
    pub dz: f64,
    pub snr: f64,
    pub missing: f64,
    pub true_frequencies: Vec<f64>,
    pub replicates: usize,
    pub hits: usize,
}

impl CellSummary {
    pub fn detection_rate(&self) -> f64 {
        self.hits as f64 / self.replicates as f64
    }
}

/// All replicates of one study.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentTable {
    pub study: Study,
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentTable {
    /// Aggregates rows into per-cell detection rates, preserving the order
    /// in which cells first appear.
    pub fn cells(&self) -> Vec<CellSummary> {
        let mut cells: Vec<CellSummary> = Vec::new();
        for row in &self.rows {
            let found = cells.iter_mut().find(|c| {
                c.n == row.n
                    && c.dz.to_bits() == row.dz.to_bits()
                    && c.snr.to_bits() == row.snr.to_bits()
                    && c.missing.to_bits() == row.missing.to_bits()
                    && c.true_frequencies == row.true_frequencies
            });
            match found {
                Some(cell) => {
                    cell.replicates += 1;
                    cell.hits += usize::from(row.hit);
                }
                None => cells.push(CellSummary {
                    n: row.n,
                    dz: row.dz,
                    snr: row.snr,
                    missing: row.missing,
                    true_frequencies: row.true_frequencies.clone(),
                    replicates: 1,
                    hits: usize::from(row.hit),
                }),
            }
        }
        cells
    }

    /// Writes one CSV row per replicate. Frequency lists are joined with
    /// semicolons; an empty `observed` field records a starved replicate.
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        out.push_str(
            "study,n,dz,snr,missing,true_frequencies,replicate,seed,k_used,observed,hit\n",
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                self.study,
                row.n,
                row.dz,
                row.snr,
                row.missing,
                join_frequencies(&row.true_frequencies),
                row.replicate,
                row.seed,
                row.k_used,
                join_frequencies(&row.observed),
                row.hit,
            );
        }
        fs::write(path, out).map_err(|source| KzpError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn join_frequencies(freqs: &[f64]) -> String {
    let mut out = String::new();
    for (i, f) in freqs.iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        let _ = write!(out, "{f}");
    }
    out
}

/// Matches each true frequency to a distinct reported one within
/// `tolerance`, greedily taking the closest unused candidate. Returns
/// `true` only when every true frequency is matched.
fn matched_within(true_frequencies: &[f64], observed: &[f64], tolerance: f64) -> bool {
    let mut used = vec![false; observed.len()];
    for &target in true_frequencies {
        let mut best: Option<(usize, f64)> = None;
        for (i, &candidate) in observed.iter().enumerate() {
            if used[i] {
                continue;
            }
            let distance = (candidate - target).abs();
            if distance <= tolerance && best.is_none_or(|(_, d)| distance < d) {
                best = Some((i, distance));
            }
        }
        match best {
            Some((i, _)) => used[i] = true,
            None => return false,
        }
    }
    true
}

/// Detection tolerance for a cell: one grid step, doubled for short series
/// where spectral leakage widens the peak.
fn hit_tolerance(n: usize, m: usize) -> f64 {
    let steps = if n < 5000 { 2.0 } else { 1.0 };
    steps / m as f64 + 1e-9
}

struct RowRunner<'a> {
    config: &'a ScenarioConfig,
    rows: Vec<ExperimentRow>,
    next_index: u64,
}

impl<'a> RowRunner<'a> {
    fn new(config: &'a ScenarioConfig) -> Self {
        RowRunner {
            config,
            rows: Vec::new(),
            next_index: 0,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn run_row(
        &mut self,
        n: usize,
        dz: f64,
        snr: f64,
        missing: f64,
        components: &[SignalComponent],
        true_frequencies: &[f64],
        top: usize,
        replicate: usize,
    ) -> Result<()> {
        let seed = self.config.base_seed ^ self.next_index;
        self.next_index += 1;
        let k_used = self.config.k_for(n);
        let observed = self.detect(n, dz, missing, components, top, seed, k_used)?;
        let hit = matched_within(true_frequencies, &observed, hit_tolerance(n, self.config.m));
        self.rows.push(ExperimentRow {
            n,
            dz,
            snr,
            missing,
            true_frequencies: true_frequencies.to_vec(),
            replicate,
            seed,
            k_used,
            observed,
            hit,
        });
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn detect(
        &self,
        n: usize,
        dz: f64,
        missing: f64,
        components: &[SignalComponent],
        top: usize,
        seed: u64,
        k_used: usize,
    ) -> Result<Vec<f64>> {
        let spec = SignalSpec {
            n,
            components: components.to_vec(),
            noise_sigma: self.config.noise_sigma,
            seed,
        };
        let mut series = generate(&spec)?;
        if missing > 0.0 {
            series = inject_missing(&series, missing, seed ^ MISSING_SEED_SALT)?;
        }
        match kzp(
            &series,
            self.config.m,
            k_used,
            dz,
            self.config.method,
            self.config.digits,
            top,
        ) {
            Ok(result) => Ok(result.top_frequencies),
            Err(
                KzpError::NoValidWindows
                | KzpError::SeriesTooShort { .. }
                | KzpError::InsufficientObservations { .. },
            ) => Ok(Vec::new()),
            Err(other) => Err(other),
        }
    }

    fn finish(self) -> ExperimentTable {
        ExperimentTable {
            study: self.config.study,
            rows: self.rows,
        }
    }
}

/// Sweeps signal-to-noise ratio downward for a single tone and records
/// how often the pipeline still finds it.
pub fn run_sensitivity(config: &ScenarioConfig) -> Result<ExperimentTable> {
    config.validate()?;
    let truth = [config.signal_frequency];
    let mut runner = RowRunner::new(config);
    for &n in &config.n_values {
        for &dz in &config.dz_levels {
            for snr in config.snr_sweep(dz)? {
                let amplitude = config.noise_sigma * snr.sqrt();
                let components = [SignalComponent::new(config.signal_frequency, amplitude)];
                for replicate in 0..config.replicates {
                    runner.run_row(n, dz, snr, 0.0, &components, &truth, 1, replicate)?;
                }
            }
        }
    }
    Ok(runner.finish())
}

/// Probes recovery of individual frequencies, including off-grid ones,
/// at a fixed moderate amplitude.
pub fn run_accuracy(config: &ScenarioConfig) -> Result<ExperimentTable> {
    config.validate()?;
    let amplitude = config.accuracy_amplitude;
    let snr = amplitude * amplitude / (config.noise_sigma * config.noise_sigma);
    let mut runner = RowRunner::new(config);
    for &n in &config.n_values {
        for &dz in &config.dz_levels {
            for &frequency in &config.accuracy_frequencies {
                let components = [SignalComponent::new(frequency, amplitude)];
                let truth = [frequency];
                for replicate in 0..config.replicates {
                    runner.run_row(n, dz, snr, 0.0, &components, &truth, 1, replicate)?;
                }
            }
        }
    }
    Ok(runner.finish())
}

/// Pairs the target tone with a second tone of shrinking separation and
/// asks for both back. A hit requires both tones matched to distinct
/// reported frequencies.
pub fn run_resolution(config: &ScenarioConfig) -> Result<ExperimentTable> {
    config.validate()?;
    let amplitude = config.resolution_amplitude;
    let snr = 2.0 * amplitude * amplitude / (config.noise_sigma * config.noise_sigma);
    let mut runner = RowRunner::new(config);
    for &n in &config.n_values {
        for &dz in &config.dz_levels {
            for &second in &config.second_frequencies {
                let components = [
                    SignalComponent::new(config.signal_frequency, amplitude),
                    SignalComponent::new(second, amplitude),
                ];
                let truth = [config.signal_frequency, second];
                for replicate in 0..config.replicates {
                    runner.run_row(n, dz, snr, 0.0, &components, &truth, 2, replicate)?;
                }
            }
        }
    }
    Ok(runner.finish())
}

/// Removes observations completely at random in growing fractions and
/// records detection of a single tone. Replicates whose gaps starve every
/// window are recorded as misses with no observed frequencies.
pub fn run_robustness(config: &ScenarioConfig) -> Result<ExperimentTable> {
    config.validate()?;
    let truth = [config.signal_frequency];
    let mut runner = RowRunner::new(config);
    for &n in &config.n_values {
        for (level, &dz) in config.dz_levels.iter().enumerate() {
            let snr = config.robustness_snr[level];
            let amplitude = config.noise_sigma * snr.sqrt();
            let components = [SignalComponent::new(config.signal_frequency, amplitude)];
            for &missing in &config.missing_fractions {
                for replicate in 0..config.replicates {
                    runner.run_row(n, dz, snr, missing, &components, &truth, 1, replicate)?;
                }
            }
        }
    }
    Ok(runner.finish())
}

/// Runs the study named by `config.study`.
pub fn run_study(config: &ScenarioConfig) -> Result<ExperimentTable> {
    match config.study {
        Study::Sensitivity => run_sensitivity(config),
        Study::Accuracy => run_accuracy(config),
        Study::Resolution => run_resolution(config),
        Study::Robustness => run_robustness(config),
    }
}

/// Writes a plain-text run manifest: `key = value` lines for `entries`,
/// then one `artifact <name> sha256=<hex>` line per file so a rerun can be
/// checked for byte-identical output.
pub fn write_run_manifest<P: AsRef<Path>>(
    path: P,
    entries: &[(String, String)],
    artifacts: &[PathBuf],
) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for (key, value) in entries {
        let _ = writeln!(out, "{key} = {value}");
    }
    for artifact in artifacts {
        let bytes = fs::read(artifact).map_err(|source| KzpError::Io {
            path: artifact.clone(),
            source,
        })?;
        let digest = Sha256::digest(&bytes);
        let mut hex = String::with_capacity(64);
        for byte in digest {
            let _ = write!(hex, "{byte:02x}");
        }
        let name = artifact
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| artifact.display().to_string());
        let _ = writeln!(out, "artifact {name} sha256={hex}");
    }
    fs::write(path, out).map_err(|source| KzpError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parameters for the end-to-end demonstration run.
#[derive(Debug, Clone, PartialEq)]
pub struct ShowcaseConfig {
    /// Directory receiving all CSV, SVG, and manifest artifacts.
    pub out_dir: PathBuf,
    pub n: usize,
    pub components: Vec<SignalComponent>,
    pub noise_sigma: f64,
    pub seed: u64,
    pub m: usize,
    pub k: usize,
    pub smooth_level: f64,
    pub method: SmoothMethod,
    pub digits: u32,
    /// How many dominant frequencies to keep and reconstruct.
    pub top: usize,
    /// Fraction removed for the missing-data rerun.
    pub missing_fraction: f64,
    /// Largest lag of the residual correlogram.
    pub acf_max_lag: usize,
    /// Time window highlighted in the reconstruction plots.
    pub plot_window: (i64, i64),
}

impl ShowcaseConfig {
    /// The published demonstration: two tones at 0.084 and 0.098 cycles
    /// per step in noise four times the weaker amplitude.
    pub fn standard(out_dir: impl Into<PathBuf>) -> Self {
        ShowcaseConfig {
            out_dir: out_dir.into(),
            n: 5000,
            components: vec![
                SignalComponent::new(0.084, 1.0),
                SignalComponent::new(0.098, 1.5),
            ],
            noise_sigma: 4.0,
            seed: 42,
            m: 500,
            k: 3,
            smooth_level: 0.05,
            method: SmoothMethod::Dz,
            digits: 3,
            top: 2,
            missing_fraction: 0.5,
            acf_max_lag: 40,
            plot_window: (760, 860),
        }
    }
}

/// Everything the demonstration run measured.
#[derive(Debug, Clone)]
pub struct ShowcaseReport {
    /// Dominant frequencies found in the complete series.
    pub top_frequencies: Vec<f64>,
    /// Reconstruction quality against the noise-free truth.
    pub fit: FitMetrics,
    /// Order of the autoregressive model fitted to the reconstruction
    /// residuals.
    pub ar_order: usize,
    /// Fraction of residual variance the autoregressive model leaves
    /// unexplained; near one means the residuals are noise.
    pub ar_unexplained: f64,
    /// Dominant frequencies found after removing half the observations.
    pub missing_top_frequencies: Vec<f64>,
    /// Reconstruction quality of the gapped rerun.
    pub missing_fit: FitMetrics,
    /// Paths of every file written, in creation order.
    pub artifacts: Vec<PathBuf>,
}

/// Runs the full pipeline on a simulated two-tone series, then repeats it
/// with half the observations removed, writing CSVs, plots, and a manifest
/// into `config.out_dir`.
pub fn run_showcase(config: &ShowcaseConfig) -> Result<ShowcaseReport> {
    fs::create_dir_all(&config.out_dir).map_err(|source| KzpError::Io {
        path: config.out_dir.clone(),
        source,
    })?;
    let mut artifacts: Vec<PathBuf> = Vec::new();
    let out = |name: &str| config.out_dir.join(name);

    let noisy_spec = SignalSpec {
        n: config.n,
        components: config.components.clone(),
        noise_sigma: config.noise_sigma,
        seed: config.seed,
    };
    let truth_spec = noisy_spec.noise_free();
    let series = generate(&noisy_spec)?;
    let truth = generate(&truth_spec)?;

    let series_path = out("series.csv");
    series.save_csv(&series_path)?;
    artifacts.push(series_path);
    let truth_path = out("truth.csv");
    truth.save_csv(&truth_path)?;
    artifacts.push(truth_path);

    let raw = raw_periodogram(&series)?;
    let raw_path = out("raw_periodogram.csv");
    raw.save_csv(&raw_path)?;
    artifacts.push(raw_path);
    let raw_plot = out("raw_periodogram.svg");
    plot_periodogram(&raw_plot, &raw, "Raw periodogram")?;
    artifacts.push(raw_plot);

    let result = kzp(
        &series,
        config.m,
        config.k,
        config.smooth_level,
        config.method,
        config.digits,
        config.top,
    )?;
    let spectrum_path = out("kzp_spectrum.csv");
    result.write_csv(&spectrum_path)?;
    artifacts.push(spectrum_path);
    let spectrum_plot = out("kzp_spectrum.svg");
    plot_kzp(&spectrum_plot, &result, "Smoothed periodogram", true)?;
    artifacts.push(spectrum_plot);

    let recon = reconstruct(&series, &result.top_frequencies, config.m, config.k)?;
    let fit = fit_metrics(&truth, &recon.estimate)?;
    let recon_path = out("reconstruction.csv");
    write_reconstruction_csv(&recon_path, &truth, &series, &recon.estimate)?;
    artifacts.push(recon_path);
    let recon_plot = out("reconstruction.svg");
    plot_reconstruction(
        &recon_plot,
        &truth,
        &series,
        &recon.estimate,
        Some(config.plot_window),
        "Reconstruction",
    )?;
    artifacts.push(recon_plot);

    let residuals = residual_series(&series, &recon.estimate)?;
    let correlations = acf(&residuals, config.acf_max_lag)?;
    let acf_path = out("residual_acf.csv");
    write_acf_csv(&acf_path, &correlations)?;
    artifacts.push(acf_path);
    let acf_plot = out("residual_acf.svg");
    plot_correlogram(&acf_plot, &correlations, "Residual autocorrelation")?;
    artifacts.push(acf_plot);
    let model = yule_walker(&residuals, None)?;
    let ar_unexplained = unexplained_ratio(&model, &residuals)?;

    let gapped = inject_missing(
        &series,
        config.missing_fraction,
        config.seed ^ MISSING_SEED_SALT,
    )?;
    let gapped_path = out("missing_series.csv");
    gapped.save_csv(&gapped_path)?;
    artifacts.push(gapped_path);
    let missing_result = kzp(
        &gapped,
        config.m,
        config.k,
        config.smooth_level,
        config.method,
        config.digits,
        config.top,
    )?;
    let missing_spectrum_path = out("missing_kzp_spectrum.csv");
    missing_result.write_csv(&missing_spectrum_path)?;
    artifacts.push(missing_spectrum_path);
    let missing_spectrum_plot = out("missing_kzp_spectrum.svg");
    plot_kzp(
        &missing_spectrum_plot,
        &missing_result,
        "Smoothed periodogram, gapped series",
        true,
    )?;
    artifacts.push(missing_spectrum_plot);

    let missing_recon = reconstruct(&gapped, &missing_result.top_frequencies, config.m, config.k)?;
    let missing_fit = fit_metrics(&truth, &missing_recon.estimate)?;
    let missing_recon_path = out("missing_reconstruction.csv");
    write_reconstruction_csv(
        &missing_recon_path,
        &truth,
        &gapped,
        &missing_recon.estimate,
    )?;
    artifacts.push(missing_recon_path);
    let missing_recon_plot = out("missing_reconstruction.svg");
    plot_reconstruction(
        &missing_recon_plot,
        &truth,
        &gapped,
        &missing_recon.estimate,
        Some(config.plot_window),
        "Reconstruction from gapped data",
    )?;
    artifacts.push(missing_recon_plot);

    let entries = vec![
        ("study".to_string(), "showcase".to_string()),
        ("n".to_string(), config.n.to_string()),
        (
            "components".to_string(),
            describe_components(&config.components),
        ),
        ("noise_sigma".to_string(), config.noise_sigma.to_string()),
        ("seed".to_string(), config.seed.to_string()),
        ("m".to_string(), config.m.to_string()),
        ("k".to_string(), config.k.to_string()),
        ("smooth_level".to_string(), config.smooth_level.to_string()),
        ("method".to_string(), config.method.to_string()),
        ("digits".to_string(), config.digits.to_string()),
        ("top".to_string(), config.top.to_string()),
        (
            "missing_fraction".to_string(),
            config.missing_fraction.to_string(),
        ),
        (
            "missing_seed".to_string(),
            (config.seed ^ MISSING_SEED_SALT).to_string(),
        ),
        (
            "top_frequencies".to_string(),
            join_frequencies(&result.top_frequencies),
        ),
        ("r".to_string(), fit.r.to_string()),
        ("r_squared".to_string(), fit.r_squared.to_string()),
        ("ar_order".to_string(), model.order.to_string()),
        ("ar_unexplained".to_string(), ar_unexplained.to_string()),
        (
            "missing_top_frequencies".to_string(),
            join_frequencies(&missing_result.top_frequencies),
        ),
        (
            "missing_r_squared".to_string(),
            missing_fit.r_squared.to_string(),
        ),
    ];
    let manifest_path = out("manifest.txt");
    write_run_manifest(&manifest_path, &entries, &artifacts)?;
    artifacts.push(manifest_path);

    Ok(ShowcaseReport {
        top_frequencies: result.top_frequencies,
        fit,
        ar_order: model.order,
        ar_unexplained,
        missing_top_frequencies: missing_result.top_frequencies,
        missing_fit,
        artifacts,
    })
}

fn describe_components(components: &[SignalComponent]) -> String {
    let mut out = String::new();
    for (i, c) in components.iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        let _ = write!(out, "{}:{}", c.frequency, c.amplitude);
        if c.phase != 0.0 {
            let _ = write!(out, ":{}", c.phase);
        }
    }
    out
}

/// Observed values minus the harmonic estimate over the jointly observed
/// span, returned as a fully observed series so lag structure is exact.
/// The edge regions where the estimate is masked drop off; an interior
/// hole would scramble the autocorrelation, so it is rejected.
fn residual_series(observed: &TimeSeries, estimate: &TimeSeries) -> Result<TimeSeries> {
    if observed.len() != estimate.len() || observed.start_index() != estimate.start_index() {
        return Err(KzpError::LengthMismatch {
            left: observed.len(),
            right: estimate.len(),
        });
    }
    let joint = |i: usize| observed.is_observed(i) && estimate.is_observed(i);
    let first = (0..observed.len()).find(|&i| joint(i));
    let last = (0..observed.len()).rev().find(|&i| joint(i));
    let (first, last) = match (first, last) {
        (Some(first), Some(last)) => (first, last),
        _ => {
            return Err(KzpError::InsufficientObservations {
                needed: 2,
                available: 0,
            })
        }
    };
    if !(first..=last).all(joint) {
        return Err(KzpError::MaskedInputUnsupported);
    }
    let values = (first..=last)
        .map(|i| observed.values()[i] - estimate.values()[i])
        .collect();
    TimeSeries::from_values(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn tiny_config(study: Study) -> ScenarioConfig {
        ScenarioConfig {
            study,
            n_values: vec![400],
            dz_levels: vec![0.2],
            m: 25,
            k: 2,
            noise_sigma: 1.0,
            base_seed: 7,
            replicates: 3,
            method: SmoothMethod::Dz,
            digits: 3,
            signal_frequency: 0.2,
            snr_values: vec![9.0],
            accuracy_frequencies: vec![0.2, 0.32],
            accuracy_amplitude: 3.0,
            second_frequencies: vec![0.32],
            resolution_amplitude: 3.0,
            missing_fractions: vec![0.0, 0.3],
            robustness_snr: vec![9.0],
        }
    }

    #[test]
    fn standard_config_matches_published_sweeps() {
        let config = ScenarioConfig::standard(Study::Sensitivity);
        assert_eq!(config.n_values, vec![5000, 1000]);
        assert_eq!(config.dz_levels, vec![0.05, 0.01]);
        assert_eq!(config.replicates, 20);
        assert_eq!(config.base_seed, 24);
        let wide = standard_snr_sweep(0.05).unwrap();
        assert_eq!(wide.len(), 8);
        assert_eq!(wide[0], 0.052);
        assert_eq!(wide[7], 0.045);
        let narrow = standard_snr_sweep(0.01).unwrap();
        assert_eq!(narrow[0], 0.017);
        assert_eq!(narrow[7], 0.010);
        assert!(standard_snr_sweep(0.3).is_none());
    }

    #[test]
    fn nonstandard_level_requires_explicit_sweep() {
        let mut config = tiny_config(Study::Sensitivity);
        config.snr_values.clear();
        let err = run_sensitivity(&config).unwrap_err();
        assert!(matches!(
            err,
            KzpError::InvalidParameter {
                name: "snr_values",
                ..
            }
        ));
    }

    #[test]
    fn k_is_reduced_when_support_does_not_fit() {
        let config = ScenarioConfig::standard(Study::Sensitivity);
        assert_eq!(config.k_for(5000), 3);
        assert_eq!(config.k_for(1000), 2);
        assert_eq!(config.k_for(500), 1);
        assert_eq!(config.k_for(2), 1);
    }

    #[test]
    fn study_names_round_trip() {
        for study in [
            Study::Sensitivity,
            Study::Accuracy,
            Study::Resolution,
            Study::Robustness,
        ] {
            assert_eq!(study.to_string().parse::<Study>().unwrap(), study);
        }
        assert!("spectral".parse::<Study>().is_err());
    }

    #[test]
    fn matching_is_exclusive() {
        assert!(matched_within(&[0.1], &[0.1], 0.01));
        assert!(!matched_within(&[0.1], &[0.15], 0.01));
        assert!(matched_within(&[0.1, 0.2], &[0.201, 0.099], 0.01));
        assert!(!matched_within(&[0.1, 0.102], &[0.101], 0.01));
        assert!(matched_within(&[], &[], 0.01));
        assert!(!matched_within(&[0.1], &[], 0.01));
    }

    #[test]
    fn sensitivity_is_reproducible_and_seeded_by_row() {
        let config = tiny_config(Study::Sensitivity);
        let first = run_sensitivity(&config).unwrap();
        let second = run_sensitivity(&config).unwrap();
        assert_eq!(first, second);
        assert_eq!(first.rows.len(), 3);
        for (index, row) in first.rows.iter().enumerate() {
            assert_eq!(row.seed, config.base_seed ^ index as u64);
            assert_eq!(row.k_used, 2);
            assert_eq!(row.replicate, index);
        }
        let mut reseeded = config.clone();
        reseeded.base_seed = 8;
        let third = run_sensitivity(&reseeded).unwrap();
        assert_ne!(first.rows, third.rows);
    }

    #[test]
    fn strong_tone_is_always_detected() {
        let config = tiny_config(Study::Sensitivity);
        let table = run_sensitivity(&config).unwrap();
        for row in &table.rows {
            assert_eq!(row.observed, vec![0.2]);
            assert!(row.hit);
        }
        let cells = table.cells();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].replicates, 3);
        assert_eq!(cells[0].detection_rate(), 1.0);
    }

    #[test]
    fn accuracy_covers_each_probe_frequency() {
        let config = tiny_config(Study::Accuracy);
        let table = run_accuracy(&config).unwrap();
        assert_eq!(table.rows.len(), 6);
        let cells = table.cells();
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0].true_frequencies, vec![0.2]);
        assert_eq!(cells[1].true_frequencies, vec![0.32]);
        for cell in &cells {
            assert_eq!(cell.hits, 3);
        }
    }

    #[test]
    fn resolution_requires_both_tones() {
        let mut config = tiny_config(Study::Resolution);
        let separated = run_resolution(&config).unwrap();
        assert!(separated.rows.iter().all(|row| row.hit));
        config.second_frequencies = vec![config.signal_frequency];
        let merged = run_resolution(&config).unwrap();
        assert!(merged.rows.iter().all(|row| !row.hit));
    }

    #[test]
    fn starved_replicates_become_misses() {
        let mut config = tiny_config(Study::Robustness);
        config.missing_fractions = vec![0.95];
        let table = run_robustness(&config).unwrap();
        for row in &table.rows {
            assert!(row.observed.is_empty());
            assert!(!row.hit);
        }
    }

    #[test]
    fn robustness_sweeps_missing_fractions() {
        let config = tiny_config(Study::Robustness);
        let table = run_robustness(&config).unwrap();
        assert_eq!(table.rows.len(), 6);
        let cells = table.cells();
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0].missing, 0.0);
        assert_eq!(cells[1].missing, 0.3);
        assert_eq!(cells[0].hits, 3);
    }

    #[test]
    fn csv_rows_follow_the_schema() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("table.csv");
        let config = tiny_config(Study::Sensitivity);
        let table = run_sensitivity(&config).unwrap();
        table.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "study,n,dz,snr,missing,true_frequencies,replicate,seed,k_used,observed,hit"
        );
        let first = lines.next().unwrap();
        assert_eq!(first, "sensitivity,400,0.2,9,0,0.2,0,7,2,0.2,true");
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn validation_rejects_degenerate_configs() {
        let mut config = tiny_config(Study::Sensitivity);
        config.replicates = 0;
        assert!(run_sensitivity(&config).is_err());
        let mut config = tiny_config(Study::Sensitivity);
        config.noise_sigma = 0.0;
        assert!(run_sensitivity(&config).is_err());
        let mut config = tiny_config(Study::Robustness);
        config.robustness_snr = vec![];
        assert!(run_robustness(&config).is_err());
        let mut config = tiny_config(Study::Resolution);
        config.second_frequencies = vec![];
        assert!(run_resolution(&config).is_err());
    }

    #[test]
    fn manifest_lists_entries_then_hashes() {
        let dir = tempdir().unwrap();
        let data_path = dir.path().join("data.bin");
        std::fs::write(&data_path, b"hello").unwrap();
        let manifest_path = dir.path().join("manifest.txt");
        write_run_manifest(
            &manifest_path,
            &[("seed".to_string(), "42".to_string())],
            &[data_path],
        )
        .unwrap();
        let text = std::fs::read_to_string(&manifest_path).unwrap();
        assert_eq!(
            text,
            "seed = 42\nartifact data.bin sha256=2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824\n"
        );
    }

    #[test]
    fn showcase_writes_all_artifacts() {
        let dir = tempdir().unwrap();
        let config = ShowcaseConfig {
            out_dir: dir.path().join("demo"),
            n: 600,
            components: vec![
                SignalComponent::new(0.1, 1.0),
                SignalComponent::new(0.2, 1.5),
            ],
            noise_sigma: 0.5,
            seed: 11,
            m: 50,
            k: 2,
            smooth_level: 0.1,
            method: SmoothMethod::Dz,
            digits: 3,
            top: 2,
            missing_fraction: 0.2,
            acf_max_lag: 20,
            plot_window: (100, 200),
        };
        let report = run_showcase(&config).unwrap();
        assert_eq!(report.artifacts.len(), 16);
        for path in &report.artifacts {
            assert!(path.exists(), "missing artifact {}", path.display());
        }
        let mut sorted = report.top_frequencies.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(sorted, vec![0.1, 0.2]);
        assert!(report.fit.r_squared > 0.95);
        assert!(report.missing_fit.r_squared > 0.9);
        assert!(report.ar_unexplained > 0.8);
        let manifest = std::fs::read_to_string(config.out_dir.join("manifest.txt")).unwrap();
        assert!(manifest.contains("study = showcase"));
        assert!(manifest.contains("artifact series.csv sha256="));
        assert_eq!(manifest.matches("artifact ").count(), 15);
    }
}
