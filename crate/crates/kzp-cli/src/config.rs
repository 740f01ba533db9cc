//! Flat key=value configuration files for the experiment harness.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use kzp_core::{KzpError, Result, ScenarioConfig};

/// Applies overrides from a configuration file on top of `config`.
///
/// Each non-empty line is `key = value`; `#` starts a comment line. List
/// values are comma-separated. Unknown keys are rejected so typos do not
/// silently run the wrong experiment.
pub fn apply(config: &mut ScenarioConfig, path: &Path) -> Result<()> {
    let text = fs::read_to_string(path).map_err(|source| KzpError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let number = index + 1;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| error(path, number, "expected key = value"))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "n_values" => config.n_values = list(value, path, number)?,
            "dz_levels" => config.dz_levels = list(value, path, number)?,
            "m" => config.m = scalar(value, path, number)?,
            "k" => config.k = scalar(value, path, number)?,
            "noise_sigma" => config.noise_sigma = scalar(value, path, number)?,
            "base_seed" => config.base_seed = scalar(value, path, number)?,
            "replicates" => config.replicates = scalar(value, path, number)?,
            "method" => config.method = scalar(value, path, number)?,
            "digits" => config.digits = scalar(value, path, number)?,
            "signal_frequency" => config.signal_frequency = scalar(value, path, number)?,
            "snr_values" => config.snr_values = list(value, path, number)?,
            "accuracy_frequencies" => config.accuracy_frequencies = list(value, path, number)?,
            "accuracy_amplitude" => config.accuracy_amplitude = scalar(value, path, number)?,
            "second_frequencies" => config.second_frequencies = list(value, path, number)?,
            "resolution_amplitude" => config.resolution_amplitude = scalar(value, path, number)?,
            "missing_fractions" => config.missing_fractions = list(value, path, number)?,
            "robustness_snr" => config.robustness_snr = list(value, path, number)?,
            other => {
                return Err(error(path, number, format!("unknown key {other:?}")));
            }
        }
    }
    Ok(())
}

fn error(path: &Path, line: usize, message: impl Into<String>) -> KzpError {
    KzpError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn scalar<T>(value: &str, path: &Path, line: usize) -> Result<T>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|err| error(path, line, format!("{value:?}: {err}")))
}

fn list<T>(value: &str, path: &Path, line: usize) -> Result<Vec<T>>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|part| !part.is_empty())
        .map(|part| scalar(part, path, line))
        .collect()
}
