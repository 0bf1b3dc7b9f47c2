//! Accelerometer traces, session manifests and result tables.
//!
//! Every file this crate writes goes through the helpers here so that output
//! is stable byte for byte: fixed column order, `\n` line endings and six
//! fractional digits for every real number.

mod manifest;
mod tables;
mod trace;

pub use manifest::{
    parse_manifest, write_manifest, ActivityEntry, ActivityRecord, GroundTruth, PedometerReading,
    SessionManifest,
};
pub use tables::{
    events_csv_string, gaitmap_csv_string, parse_estimates_csv, parse_events_csv,
    parse_report_csv, read_events_csv, read_report_csv, report_csv_string, write_estimates_csv,
    write_events_csv, write_gaitmap_csv, write_report, EstimateRow, EventRow, GaitMapRow,
    ESTIMATES_HEADER, EVENTS_HEADER, GAITMAP_HEADER, REPORT_HEADER,
};
pub use trace::{accel_csv_string, parse_accel_csv, read_accel_csv, write_accel_csv};

use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_RATE_HZ: f64 = 100.0;

/// Median sample spacing may deviate this much (relative) from the nominal
/// period before a series is flagged irregular.
pub const IRREGULAR_TOLERANCE: f64 = 0.20;

/// One triaxial sample. Axes follow the waist-worn sensor frame: `ax`
/// vertical, `ay` mediolateral, `az` anteroposterior, all in g.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelSample {
    pub t: f64,
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

/// A validated, time-ordered accelerometer trace for one activity.
#[derive(Debug, Clone, PartialEq)]
pub struct AccelSeries {
    samples: Vec<AccelSample>,
    nominal_rate_hz: f64,
    irregular: bool,
}

impl AccelSeries {
    pub fn new(samples: Vec<AccelSample>, nominal_rate_hz: f64) -> Result<Self> {
        if !(nominal_rate_hz.is_finite() && nominal_rate_hz > 0.0) {
            return Err(Error::Config(format!(
                "nominal rate must be positive, got {nominal_rate_hz}"
            )));
        }
        for (i, s) in samples.iter().enumerate() {
            let row = i + 1;
            if !s.t.is_finite() || s.t < 0.0 {
                return Err(Error::Value { row, column: "t" });
            }
            for (column, v) in [("x", s.ax), ("y", s.ay), ("z", s.az)] {
                if !v.is_finite() {
                    return Err(Error::Value { row, column });
                }
            }
            if i > 0 && s.t <= samples[i - 1].t {
                return Err(Error::Ordering { row });
            }
        }
        let mut series = AccelSeries {
            samples,
            nominal_rate_hz,
            irregular: false,
        };
        series.irregular = match series.median_interval() {
            Some(dt) => {
                let period = 1.0 / nominal_rate_hz;
                (dt - period).abs() > IRREGULAR_TOLERANCE * period
            }
            None => false,
        };
        Ok(series)
    }

    /// Builds a uniformly sampled series from an anteroposterior channel
    /// alone; the other axes are zero.
    pub fn from_anteroposterior(ap: &[f64], rate_hz: f64) -> Result<Self> {
        let samples = ap
            .iter()
            .enumerate()
            .map(|(k, &az)| AccelSample {
                t: k as f64 / rate_hz,
                ax: 0.0,
                ay: 0.0,
                az,
            })
            .collect();
        AccelSeries::new(samples, rate_hz)
    }

    pub fn samples(&self) -> &[AccelSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn nominal_rate_hz(&self) -> f64 {
        self.nominal_rate_hz
    }

    pub fn is_irregular(&self) -> bool {
        self.irregular
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn anteroposterior(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.az).collect()
    }

    /// Time between first and last sample.
    pub fn span_s(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    pub fn median_interval(&self) -> Option<f64> {
        if self.samples.len() < 2 {
            return None;
        }
        let mut dts: Vec<f64> = self.samples.windows(2).map(|w| w[1].t - w[0].t).collect();
        Some(median(&mut dts))
    }

    pub(crate) fn require_processable(&self) -> Result<()> {
        if self.samples.len() < 2 {
            return Err(Error::TooShort {
                len: self.samples.len(),
                required: 2,
            });
        }
        Ok(())
    }
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Six fractional digits, never `-0.000000`.
pub(crate) fn fmt6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}
