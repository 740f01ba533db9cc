//! Evenly spaced time series with an explicit observation mask.
//!
//! A [`TimeSeries`] stores one value per integer time step together with a
//! boolean mask telling which steps were actually observed. Masked steps take
//! part in windowed operations only through the mask, so downstream code never
//! has to invent sentinel values for gaps.
//!
//! Series round-trip through a two column CSV layout, `t,value`, where a
//! missing observation is written as an empty value field:
//!
//! ```text
//! 0,1.25
//! 1,
//! 2,-0.75
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{KzpError, Result};

/// Evenly spaced series over consecutive integer time stamps.
///
/// The first sample sits at `start_index`, the second at `start_index + 1`,
/// and so on. Values at masked positions are zeroed on construction and carry
/// no information.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    mask: Vec<bool>,
    start_index: i64,
}

/// Summary statistics over the observed samples of a series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesStats {
    /// Mean of the observed values.
    pub mean: f64,
    /// Population variance of the observed values.
    pub variance: f64,
    /// Number of observed samples.
    pub n_observed: usize,
    /// Number of masked samples.
    pub n_missing: usize,
}

impl TimeSeries {
    /// Builds a series from values, an observation mask and a start time.
    ///
    /// The two slices must have equal, nonzero length and every observed
    /// value must be finite. Values at masked positions are discarded.
    pub fn new(values: Vec<f64>, mask: Vec<bool>, start_index: i64) -> Result<Self> {
        if values.is_empty() {
            return Err(KzpError::EmptySeries);
        }
        if values.len() != mask.len() {
            return Err(KzpError::LengthMismatch {
                left: values.len(),
                right: mask.len(),
            });
        }
        let mut values = values;
        for (index, (value, &observed)) in values.iter_mut().zip(&mask).enumerate() {
            if observed {
                if !value.is_finite() {
                    return Err(KzpError::NonFiniteValue { index });
                }
            } else {
                *value = 0.0;
            }
        }
        Ok(Self {
            values,
            mask,
            start_index,
        })
    }

    /// Builds a fully observed series starting at time zero.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let mask = vec![true; values.len()];
        Self::new(values, mask, 0)
    }

    /// Number of time steps covered, observed or not.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when the series covers no time steps. Constructors reject this,
    /// so the method exists for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time stamp of the first sample.
    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    /// Raw values, one per time step. Masked positions hold zero.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Observation mask, one flag per time step.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Whether the sample at position `index` was observed.
    pub fn is_observed(&self, index: usize) -> bool {
        self.mask[index]
    }

    /// Time stamp of the sample at position `index`.
    pub fn time_at(&self, index: usize) -> i64 {
        self.start_index + index as i64
    }

    /// Number of observed samples.
    pub fn n_observed(&self) -> usize {
        self.mask.iter().filter(|&&observed| observed).count()
    }

    /// Fraction of samples that are observed, in `[0, 1]`.
    pub fn observed_fraction(&self) -> f64 {
        self.n_observed() as f64 / self.len() as f64
    }

    /// Iterates over `(time, value)` pairs of the observed samples.
    pub fn observed_pairs(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .zip(&self.mask)
            .enumerate()
            .filter(|(_, (_, &observed))| observed)
            .map(|(index, (&value, _))| (self.start_index + index as i64, value))
    }

    /// Mean and population variance over the observed samples.
    ///
    /// Fails when the series has no observed samples at all.
    pub fn stats(&self) -> Result<SeriesStats> {
        let n_observed = self.n_observed();
        if n_observed == 0 {
            return Err(KzpError::InsufficientObservations {
                needed: 1,
                available: 0,
            });
        }
        let mut sum = 0.0;
        for (value, &observed) in self.values.iter().zip(&self.mask) {
            if observed {
                sum += value;
            }
        }
        let mean = sum / n_observed as f64;
        let mut sq = 0.0;
        for (value, &observed) in self.values.iter().zip(&self.mask) {
            if observed {
                let d = value - mean;
                sq += d * d;
            }
        }
        Ok(SeriesStats {
            mean,
            variance: sq / n_observed as f64,
            n_observed,
            n_missing: self.len() - n_observed,
        })
    }

    /// Reads a series from a `t,value` CSV file.
    ///
    /// An optional header row is skipped. Time stamps must advance by exactly
    /// one per row; an empty value field marks a masked sample.
    pub fn load_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| KzpError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut values = Vec::new();
        let mut mask = Vec::new();
        let mut start_index = 0i64;
        let mut next_time: Option<i64> = None;
        for (line_no, raw_line) in text.lines().enumerate() {
            let line_no = line_no + 1;
            let line = raw_line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let time_field = fields.next().unwrap_or("").trim();
            let value_field = fields.next().map(str::trim);
            let (Some(value_field), None) = (value_field, fields.next()) else {
                return Err(KzpError::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: "expected exactly two fields: t,value".into(),
                });
            };
            let time: i64 = match time_field.parse() {
                Ok(time) => time,
                Err(_) if values.is_empty() && next_time.is_none() => continue,
                Err(_) => {
                    return Err(KzpError::Parse {
                        path: path.to_path_buf(),
                        line: line_no,
                        message: format!("cannot parse time stamp {time_field:?}"),
                    })
                }
            };
            match next_time {
                None => start_index = time,
                Some(expected) if time != expected => {
                    return Err(KzpError::NonContiguousTime { line: line_no })
                }
                Some(_) => {}
            }
            next_time = Some(time + 1);
            if value_field.is_empty() {
                values.push(0.0);
                mask.push(false);
            } else {
                let value: f64 = value_field.parse().map_err(|_| KzpError::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: format!("cannot parse value {value_field:?}"),
                })?;
                if !value.is_finite() {
                    return Err(KzpError::Parse {
                        path: path.to_path_buf(),
                        line: line_no,
                        message: "value is not finite".into(),
                    });
                }
                values.push(value);
                mask.push(true);
            }
        }
        if values.is_empty() {
            return Err(KzpError::EmptyFile {
                path: path.to_path_buf(),
            });
        }
        Self::new(values, mask, start_index)
    }

    /// Writes the series as `t,value` rows without a header.
    ///
    /// Masked samples are written with an empty value field. Values use the
    /// shortest decimal form that parses back to the identical float, so a
    /// save followed by a load reproduces the series exactly.
    pub fn save_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::with_capacity(self.len() * 12);
        for (index, (value, &observed)) in self.values.iter().zip(&self.mask).enumerate() {
            let time = self.start_index + index as i64;
            if observed {
                let _ = writeln!(out, "{time},{value}");
            } else {
                let _ = writeln!(out, "{time},");
            }
        }
        fs::write(path, out).map_err(|source| KzpError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_zeroes_masked_values() {
        let ts = TimeSeries::new(vec![1.0, 99.0, 3.0], vec![true, false, true], 5).unwrap();
        assert_eq!(ts.values(), &[1.0, 0.0, 3.0]);
        assert_eq!(ts.len(), 3);
        assert_eq!(ts.n_observed(), 2);
        assert_eq!(ts.start_index(), 5);
        assert_eq!(ts.time_at(2), 7);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            TimeSeries::new(vec![], vec![], 0),
            Err(KzpError::EmptySeries)
        ));
        assert!(matches!(
            TimeSeries::new(vec![1.0], vec![true, false], 0),
            Err(KzpError::LengthMismatch { left: 1, right: 2 })
        ));
        assert!(matches!(
            TimeSeries::new(vec![f64::NAN], vec![true], 0),
            Err(KzpError::NonFiniteValue { index: 0 })
        ));
    }

    #[test]
    fn masked_nan_is_discarded_rather_than_rejected() {
        let ts = TimeSeries::new(vec![f64::NAN, 2.0], vec![false, true], 0).unwrap();
        assert_eq!(ts.values()[0], 0.0);
    }

    #[test]
    fn stats_use_observed_samples_only() {
        let ts =
            TimeSeries::new(vec![1.0, 100.0, 3.0, 5.0], vec![true, false, true, true], 0).unwrap();
        let stats = ts.stats().unwrap();
        assert_eq!(stats.mean, 3.0);
        assert_eq!(stats.variance, (4.0 + 0.0 + 4.0) / 3.0);
        assert_eq!(stats.n_observed, 3);
        assert_eq!(stats.n_missing, 1);
    }

    #[test]
    fn stats_fail_on_fully_masked_series() {
        let ts = TimeSeries::new(vec![0.0, 0.0], vec![false, false], 0).unwrap();
        assert!(matches!(
            ts.stats(),
            Err(KzpError::InsufficientObservations { available: 0, .. })
        ));
    }

    #[test]
    fn observed_pairs_skip_gaps() {
        let ts = TimeSeries::new(vec![1.5, 0.0, 2.5], vec![true, false, true], 10).unwrap();
        let pairs: Vec<_> = ts.observed_pairs().collect();
        assert_eq!(pairs, vec![(10, 1.5), (12, 2.5)]);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.csv");
        let ts = TimeSeries::new(
            vec![0.1 + 0.2, 0.0, -1.0e-17, 3.5],
            vec![true, false, true, true],
            -2,
        )
        .unwrap();
        ts.save_csv(&path).unwrap();
        let back = TimeSeries::load_csv(&path).unwrap();
        assert_eq!(ts, back);
    }

    #[test]
    fn load_accepts_header_and_blank_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.csv");
        fs::write(&path, "t,value\n\n0,1.5\n1,\n2,2.5\n").unwrap();
        let ts = TimeSeries::load_csv(&path).unwrap();
        assert_eq!(ts.values(), &[1.5, 0.0, 2.5]);
        assert_eq!(ts.mask(), &[true, false, true]);
        assert_eq!(ts.start_index(), 0);
    }

    #[test]
    fn load_rejects_time_gaps() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.csv");
        fs::write(&path, "0,1.0\n2,2.0\n").unwrap();
        assert!(matches!(
            TimeSeries::load_csv(&path),
            Err(KzpError::NonContiguousTime { line: 2 })
        ));
    }

    #[test]
    fn load_rejects_malformed_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.csv");
        fs::write(&path, "0,1.0,extra\n").unwrap();
        assert!(matches!(
            TimeSeries::load_csv(&path),
            Err(KzpError::Parse { line: 1, .. })
        ));
        fs::write(&path, "0,abc\n").unwrap();
        assert!(matches!(
            TimeSeries::load_csv(&path),
            Err(KzpError::Parse { line: 1, .. })
        ));
        fs::write(&path, "t,value\n").unwrap();
        assert!(matches!(
            TimeSeries::load_csv(&path),
            Err(KzpError::EmptyFile { .. })
        ));
    }

    #[test]
    fn missing_file_reports_io_error() {
        assert!(matches!(
            TimeSeries::load_csv("/nonexistent/series.csv"),
            Err(KzpError::Io { .. })
        ));
    }
}
