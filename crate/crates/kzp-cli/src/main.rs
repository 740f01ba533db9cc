//! Command-line front end for the spectral-analysis library.
//!
//! The bare command runs the full detection pipeline on a CSV series;
//! subcommands cover simulation, harmonic reconstruction, the seeded
//! experiment harness, and autoregressive residual modeling. Exit codes:
//! 0 on success, 1 on a computational error, 2 on a usage error.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kzp_core::{
    acf, fit_metrics, generate, inject_missing, kzp, plot_correlogram, plot_kzp,
    plot_reconstruction, reconstruct, run_showcase, run_study, snr, unexplained_ratio,
    write_acf_csv, write_reconstruction_csv, write_run_manifest, yule_walker, Result,
    ScenarioConfig, ShowcaseConfig, SignalComponent, SignalSpec, SmoothMethod, Study, TimeSeries,
    MISSING_SEED_SALT,
};

#[derive(Parser)]
#[command(
    name = "kzp",
    version,
    about = "Adaptive spectral analysis with Kolmogorov-Zurbenko filters",
    subcommand_negates_reqs = true
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    analyze: AnalyzeArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a sinusoid-plus-noise series and write it as CSV.
    Simulate(SimulateArgs),
    /// Extract harmonic components at chosen frequencies and score the fit.
    Reconstruct(ReconstructArgs),
    /// Run a seeded Monte-Carlo study or the end-to-end showcase.
    Experiment(ExperimentArgs),
    /// Fit an autoregressive model and write the autocorrelation function.
    Ar(ArArgs),
}

/// Detect dominant frequencies in a series (the default command).
#[derive(Args)]
struct AnalyzeArgs {
    /// Input CSV with rows `t,value`; an empty value marks a missing sample.
    #[arg(long = "in", value_name = "PATH", required = true)]
    input: Option<PathBuf>,
    /// Filter window width in samples.
    #[arg(long, required = true)]
    m: Option<usize>,
    /// Filter iterations.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Adaptive smoothing level in (0, 1].
    #[arg(long, default_value_t = 0.05)]
    smooth: f64,
    /// Smoothing method: dz (variance-based) or nz (information-based).
    #[arg(long, default_value = "dz")]
    method: SmoothMethod,
    /// Decimal places for reported frequencies.
    #[arg(long, default_value_t = 3)]
    digits: u32,
    /// How many dominant frequencies to report.
    #[arg(long, default_value_t = 2)]
    top: usize,
    /// Output CSV for the spectrum (default kzp_spectrum.csv in the output directory).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Write an SVG chart of the spectrum to this path.
    #[arg(long, value_name = "PATH")]
    plot: Option<PathBuf>,
    /// Plot intensity on a logarithmic axis.
    #[arg(long)]
    log_scale: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of samples.
    #[arg(long)]
    n: usize,
    /// Signal component `frequency:amplitude` or `frequency:amplitude:phase`; repeatable.
    #[arg(long = "component", value_name = "F:A[:P]", value_parser = parse_component)]
    components: Vec<SignalComponent>,
    /// Noise standard deviation.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// Seed for the noise stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction of samples to remove completely at random.
    #[arg(long, value_name = "FRACTION")]
    missing: Option<f64>,
    /// Seed for gap placement (defaults to a salted variant of --seed).
    #[arg(long)]
    missing_seed: Option<u64>,
    /// Output CSV (default series.csv in the output directory).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Also write the noise-free signal to this path.
    #[arg(long, value_name = "PATH")]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Input CSV with rows `t,value`; an empty value marks a missing sample.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Comma-separated frequencies to extract, each strictly inside (0, 0.5).
    #[arg(long, value_delimiter = ',', required = true)]
    freqs: Vec<f64>,
    /// Filter window width in samples.
    #[arg(long)]
    m: usize,
    /// Filter iterations.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Noise-free reference CSV; the fit is scored against the input when absent.
    #[arg(long, value_name = "PATH")]
    truth: Option<PathBuf>,
    /// Output CSV (default reconstruction.csv in the output directory).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Write an overlay SVG of truth, observations, and estimate to this path.
    #[arg(long, value_name = "PATH")]
    plot: Option<PathBuf>,
    /// Restrict the plot to the time window `lo:hi`.
    #[arg(long, value_name = "LO:HI", value_parser = parse_window)]
    window: Option<(i64, i64)>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Which study to run.
    #[arg(value_enum)]
    study: StudyArg,
    /// Flat key=value file overriding the standard study configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory receiving tables and the run manifest.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the replicates per cell.
    #[arg(long)]
    replicates: Option<usize>,
}

#[derive(Args)]
struct ArArgs {
    /// Input CSV; the series must have no missing samples.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Highest autoregressive order to consider (default 10·log10 n).
    #[arg(long)]
    max_order: Option<usize>,
    /// Largest autocorrelation lag written to the CSV.
    #[arg(long, default_value_t = 40)]
    max_lag: usize,
    /// Output CSV for the autocorrelation function (default acf.csv).
    #[arg(long, value_name = "PATH")]
    acf_out: Option<PathBuf>,
    /// Write a correlogram SVG to this path.
    #[arg(long, value_name = "PATH")]
    plot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyArg {
    Sensitivity,
    Accuracy,
    Resolution,
    Robustness,
    Showcase,
}

fn parse_component(raw: &str) -> std::result::Result<SignalComponent, String> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 2 && parts.len() != 3 {
        return Err(format!(
            "expected frequency:amplitude or frequency:amplitude:phase, got {raw:?}"
        ));
    }
    let number = |part: &str, name: &str| {
        part.parse::<f64>()
            .map_err(|_| format!("{name} {part:?} is not a number"))
    };
    let frequency = number(parts[0], "frequency")?;
    let amplitude = number(parts[1], "amplitude")?;
    let mut component = SignalComponent::new(frequency, amplitude);
    if parts.len() == 3 {
        component.phase = number(parts[2], "phase")?;
    }
    Ok(component)
}

fn parse_window(raw: &str) -> std::result::Result<(i64, i64), String> {
    let (lo, hi) = raw
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {raw:?}"))?;
    let parse = |part: &str| {
        part.trim()
            .parse::<i64>()
            .map_err(|_| format!("bound {part:?} is not an integer"))
    };
    Ok((parse(lo)?, parse(hi)?))
}

/// Default output directory: `KZP_OUT_DIR` when set, else the working directory.
fn out_dir() -> PathBuf {
    std::env::var_os("KZP_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn resolve_out(explicit: Option<PathBuf>, default_name: &str) -> PathBuf {
    explicit.unwrap_or_else(|| out_dir().join(default_name))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        None => cmd_kzp(cli.analyze),
        Some(Command::Simulate(args)) => cmd_simulate(args),
        Some(Command::Reconstruct(args)) => cmd_reconstruct(args),
        Some(Command::Experiment(args)) => cmd_experiment(args),
        Some(Command::Ar(args)) => cmd_ar(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_kzp(args: AnalyzeArgs) -> Result<()> {
    let input = args.input.expect("required flag");
    let m = args.m.expect("required flag");
    let series = TimeSeries::load_csv(&input)?;
    let result = kzp(
        &series,
        m,
        args.k,
        args.smooth,
        args.method,
        args.digits,
        args.top,
    )?;
    let precision = args.digits as usize;
    if result.top_frequencies.is_empty() {
        println!("top frequencies: none");
    } else {
        let listed: Vec<String> = result
            .top_frequencies
            .iter()
            .map(|f| format!("{f:.precision$}"))
            .collect();
        println!("top frequencies: {}", listed.join(", "));
    }
    println!("total variance: {:.6}", result.total_variance);
    let out = resolve_out(args.out, "kzp_spectrum.csv");
    result.write_csv(&out)?;
    println!("spectrum: {}", out.display());
    if let Some(plot) = args.plot {
        plot_kzp(&plot, &result, "Smoothed periodogram", args.log_scale)?;
        println!("plot: {}", plot.display());
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let spec = SignalSpec {
        n: args.n,
        components: args.components,
        noise_sigma: args.sigma,
        seed: args.seed,
    };
    let mut series = generate(&spec)?;
    let described: Vec<String> = spec
        .components
        .iter()
        .map(|c| format!("{}:{}:{}", c.frequency, c.amplitude, c.phase))
        .collect();
    println!(
        "n: {}, components: [{}], sigma: {}, seed: {}",
        spec.n,
        described.join(", "),
        spec.noise_sigma,
        spec.seed
    );
    match snr(&spec) {
        Ok(ratio) => println!("signal-to-noise ratio: {ratio:.6}"),
        Err(_) => println!("signal-to-noise ratio: undefined (no noise)"),
    }
    if let Some(truth_path) = args.truth {
        let truth = generate(&spec.noise_free())?;
        truth.save_csv(&truth_path)?;
        println!("truth: {}", truth_path.display());
    }
    if let Some(fraction) = args.missing {
        let gap_seed = args.missing_seed.unwrap_or(args.seed ^ MISSING_SEED_SALT);
        series = inject_missing(&series, fraction, gap_seed)?;
        println!(
            "missing: {fraction} (gap seed {gap_seed}), observed {} of {}",
            series.n_observed(),
            series.len()
        );
    }
    let out = resolve_out(args.out, "series.csv");
    series.save_csv(&out)?;
    println!("series: {}", out.display());
    Ok(())
}

fn cmd_reconstruct(args: ReconstructArgs) -> Result<()> {
    let series = TimeSeries::load_csv(&args.input)?;
    let reference = match &args.truth {
        Some(path) => TimeSeries::load_csv(path)?,
        None => series.clone(),
    };
    let reconstruction = reconstruct(&series, &args.freqs, args.m, args.k)?;
    let fit = fit_metrics(&reconstruction.estimate, &reference)?;
    println!("r: {:.3}", fit.r);
    println!("r squared: {:.3}", fit.r_squared);
    println!("scored samples: {}", fit.n_scored);
    let out = resolve_out(args.out, "reconstruction.csv");
    write_reconstruction_csv(&out, &reference, &series, &reconstruction.estimate)?;
    println!("reconstruction: {}", out.display());
    if let Some(plot) = args.plot {
        plot_reconstruction(
            &plot,
            &reference,
            &series,
            &reconstruction.estimate,
            args.window,
            "Reconstruction",
        )?;
        println!("plot: {}", plot.display());
    }
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    let dir = args.out_dir.unwrap_or_else(out_dir);
    std::fs::create_dir_all(&dir).map_err(|source| kzp_core::KzpError::Io {
        path: dir.clone(),
        source,
    })?;
    if let StudyArg::Showcase = args.study {
        if args.config.is_some() || args.replicates.is_some() {
            return Err(kzp_core::KzpError::InvalidParameter {
                name: "showcase",
                message: "the showcase accepts only --out-dir and --seed".into(),
            });
        }
        let mut config = ShowcaseConfig::standard(&dir);
        if let Some(seed) = args.seed {
            config.seed = seed;
        }
        let report = run_showcase(&config)?;
        let listed: Vec<String> = report
            .top_frequencies
            .iter()
            .map(|f| format!("{f:.3}"))
            .collect();
        println!("top frequencies: {}", listed.join(", "));
        println!("r squared: {:.3}", report.fit.r_squared);
        println!("gapped r squared: {:.3}", report.missing_fit.r_squared);
        println!(
            "residual model: order {}, unexplained {:.3}",
            report.ar_order, report.ar_unexplained
        );
        println!(
            "artifacts: {} files in {}",
            report.artifacts.len(),
            dir.display()
        );
        return Ok(());
    }
    let study = match args.study {
        StudyArg::Sensitivity => Study::Sensitivity,
        StudyArg::Accuracy => Study::Accuracy,
        StudyArg::Resolution => Study::Resolution,
        StudyArg::Robustness => Study::Robustness,
        StudyArg::Showcase => unreachable!(),
    };
    let mut config = ScenarioConfig::standard(study);
    if let Some(path) = &args.config {
        config::apply(&mut config, path)?;
    }
    if let Some(seed) = args.seed {
        config.base_seed = seed;
    }
    if let Some(replicates) = args.replicates {
        config.replicates = replicates;
    }
    let table = run_study(&config)?;
    for cell in table.cells() {
        let truth: Vec<String> = cell.true_frequencies.iter().map(f64::to_string).collect();
        println!(
            "n={} dz={} snr={} missing={} f={} rate={:.2} ({}/{})",
            cell.n,
            cell.dz,
            cell.snr,
            cell.missing,
            truth.join(";"),
            cell.detection_rate(),
            cell.hits,
            cell.replicates
        );
    }
    let table_path = dir.join(format!("{study}.csv"));
    table.write_csv(&table_path)?;
    let list = |values: &[f64]| {
        values
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    };
    let sizes = config
        .n_values
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let mut entries = vec![
        ("study".to_string(), study.to_string()),
        ("n_values".to_string(), sizes),
        ("dz_levels".to_string(), list(&config.dz_levels)),
        ("m".to_string(), config.m.to_string()),
        ("k".to_string(), config.k.to_string()),
        ("noise_sigma".to_string(), config.noise_sigma.to_string()),
        ("base_seed".to_string(), config.base_seed.to_string()),
        ("replicates".to_string(), config.replicates.to_string()),
        ("method".to_string(), config.method.to_string()),
        ("digits".to_string(), config.digits.to_string()),
    ];
    match study {
        Study::Sensitivity => {
            entries.push((
                "signal_frequency".to_string(),
                config.signal_frequency.to_string(),
            ));
            if !config.snr_values.is_empty() {
                entries.push(("snr_values".to_string(), list(&config.snr_values)));
            }
        }
        Study::Accuracy => {
            entries.push((
                "accuracy_frequencies".to_string(),
                list(&config.accuracy_frequencies),
            ));
            entries.push((
                "accuracy_amplitude".to_string(),
                config.accuracy_amplitude.to_string(),
            ));
        }
        Study::Resolution => {
            entries.push((
                "signal_frequency".to_string(),
                config.signal_frequency.to_string(),
            ));
            entries.push((
                "second_frequencies".to_string(),
                list(&config.second_frequencies),
            ));
            entries.push((
                "resolution_amplitude".to_string(),
                config.resolution_amplitude.to_string(),
            ));
        }
        Study::Robustness => {
            entries.push((
                "signal_frequency".to_string(),
                config.signal_frequency.to_string(),
            ));
            entries.push((
                "missing_fractions".to_string(),
                list(&config.missing_fractions),
            ));
            entries.push(("robustness_snr".to_string(), list(&config.robustness_snr)));
        }
    }
    let manifest_path = dir.join(format!("{study}_manifest.txt"));
    write_run_manifest(&manifest_path, &entries, std::slice::from_ref(&table_path))?;
    println!("table: {}", table_path.display());
    println!("manifest: {}", manifest_path.display());
    Ok(())
}

fn cmd_ar(args: ArArgs) -> Result<()> {
    let series = TimeSeries::load_csv(&args.input)?;
    let model = yule_walker(&series, args.max_order)?;
    let ratio = unexplained_ratio(&model, &series)?;
    println!("order: {}", model.order);
    println!("noise variance: {:.6}", model.noise_variance);
    println!("unexplained ratio: {:.3}", ratio);
    println!("stationary: {}", model.stationary);
    let correlations = acf(&series, args.max_lag)?;
    let out = resolve_out(args.acf_out, "acf.csv");
    write_acf_csv(&out, &correlations)?;
    println!("acf: {}", out.display());
    if let Some(plot) = args.plot {
        plot_correlogram(&plot, &correlations, "Autocorrelation")?;
        println!("plot: {}", plot.display());
    }
    Ok(())
}
