use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{parse_accel_csv, read_file, write_file, AccelSeries, DEFAULT_RATE_HZ};
use crate::activity::{Activity, Cohort};
use crate::error::{Error, Result};

/// Observed (video-annotated) values for one activity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GroundTruth {
    pub observed_distance_m: Option<f64>,
    pub observed_steps: Option<u64>,
    pub observed_duration_s: Option<f64>,
}

impl GroundTruth {
    /// Observed distance divided by observed steps.
    pub fn step_length_m(&self) -> Option<f64> {
        match (self.observed_distance_m, self.observed_steps) {
            (Some(d), Some(n)) if n > 0 => Some(d / n as f64),
            _ => None,
        }
    }
}

/// Values reported by the phone's built-in pedometer. Ingested only.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PedometerReading {
    pub steps: Option<u64>,
    pub distance_m: Option<f64>,
}

/// One manifest entry: a reference to a trace plus its annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityEntry {
    pub activity: Activity,
    /// Resolved against the manifest's directory.
    pub trace: PathBuf,
    pub truth: GroundTruth,
    pub pedometer: PedometerReading,
}

/// An activity with its trace loaded.
#[derive(Debug, Clone)]
pub struct ActivityRecord {
    pub subject_id: String,
    pub activity: Activity,
    pub series: AccelSeries,
    pub truth: GroundTruth,
    pub pedometer: PedometerReading,
}

/// One subject's session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionManifest {
    pub subject_id: String,
    pub cohort: Option<Cohort>,
    pub nominal_rate_hz: f64,
    pub entries: Vec<ActivityEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestDoc {
    subject_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cohort: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nominal_rate_hz: Option<f64>,
    #[serde(rename = "activity", default)]
    activities: Vec<EntryDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    activity: String,
    trace: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    observed_distance_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    observed_steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    observed_duration_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pedometer_steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pedometer_distance_m: Option<f64>,
}

/// Parses and validates a TOML session manifest.
pub fn parse_manifest(path: impl AsRef<Path>) -> Result<SessionManifest> {
    let path = path.as_ref();
    let text = read_file(path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    let manifest = SessionManifest::from_toml(&text, base, path)?;
    for entry in &manifest.entries {
        if !entry.trace.is_file() {
            return Err(Error::io(
                &entry.trace,
                std::io::Error::new(std::io::ErrorKind::NotFound, "trace referenced by manifest not found"),
            ));
        }
    }
    Ok(manifest)
}

pub fn write_manifest(manifest: &SessionManifest, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &manifest.to_toml())
}

impl SessionManifest {
    /// Parses manifest text; trace paths are joined onto `base`. Does not
    /// touch the filesystem.
    pub fn from_toml(text: &str, base: &Path, origin: &Path) -> Result<Self> {
        let doc: ManifestDoc =
            toml::from_str(text).map_err(|e| Error::format(origin, e.message().to_string()))?;
        let cohort = doc.cohort.as_deref().map(str::parse).transpose()?;
        let nominal_rate_hz = doc.nominal_rate_hz.unwrap_or(DEFAULT_RATE_HZ);
        if !(nominal_rate_hz.is_finite() && nominal_rate_hz > 0.0) {
            return Err(Error::format(origin, "nominal_rate_hz must be positive"));
        }

        let mut entries: Vec<ActivityEntry> = Vec::with_capacity(doc.activities.len());
        for e in doc.activities {
            let activity: Activity = e.activity.parse()?;
            if entries.iter().any(|x| x.activity == activity) {
                return Err(Error::format(origin, format!("activity {activity} listed twice")));
            }
            check_non_negative(origin, activity, "observed_distance_m", e.observed_distance_m)?;
            check_non_negative(origin, activity, "pedometer_distance_m", e.pedometer_distance_m)?;
            if let Some(d) = e.observed_duration_s {
                if !(d.is_finite() && d > 0.0) {
                    return Err(Error::format(
                        origin,
                        format!("{activity}: observed_duration_s must be positive"),
                    ));
                }
            }
            if activity.is_calibration() {
                if e.observed_distance_m.is_none() {
                    return Err(Error::Incomplete {
                        activity,
                        field: "observed_distance_m",
                    });
                }
                if e.observed_steps.is_none() {
                    return Err(Error::Incomplete {
                        activity,
                        field: "observed_steps",
                    });
                }
            }
            entries.push(ActivityEntry {
                activity,
                trace: base.join(&e.trace),
                truth: GroundTruth {
                    observed_distance_m: e.observed_distance_m,
                    observed_steps: e.observed_steps,
                    observed_duration_s: e.observed_duration_s,
                },
                pedometer: PedometerReading {
                    steps: e.pedometer_steps,
                    distance_m: e.pedometer_distance_m,
                },
            });
        }
        Ok(SessionManifest {
            subject_id: doc.subject_id,
            cohort,
            nominal_rate_hz,
            entries,
        })
    }

    /// Serializes with trace paths as given (callers store them relative).
    pub fn to_toml(&self) -> String {
        let doc = ManifestDoc {
            subject_id: self.subject_id.clone(),
            cohort: self.cohort.map(|c| c.label().to_string()),
            nominal_rate_hz: Some(self.nominal_rate_hz),
            activities: self
                .entries
                .iter()
                .map(|e| EntryDoc {
                    activity: e.activity.label().to_string(),
                    trace: e.trace.clone(),
                    observed_distance_m: e.truth.observed_distance_m,
                    observed_steps: e.truth.observed_steps,
                    observed_duration_s: e.truth.observed_duration_s,
                    pedometer_steps: e.pedometer.steps,
                    pedometer_distance_m: e.pedometer.distance_m,
                })
                .collect(),
        };
        toml::to_string(&doc).expect("manifest serializes")
    }

    pub fn entry(&self, activity: Activity) -> Option<&ActivityEntry> {
        self.entries.iter().find(|e| e.activity == activity)
    }

    /// Loads every referenced trace.
    pub fn load_records(&self) -> Result<Vec<ActivityRecord>> {
        self.entries
            .iter()
            .map(|e| {
                Ok(ActivityRecord {
                    subject_id: self.subject_id.clone(),
                    activity: e.activity,
                    series: parse_accel_csv(&e.trace, self.nominal_rate_hz)?,
                    truth: e.truth,
                    pedometer: e.pedometer,
                })
            })
            .collect()
    }
}

fn check_non_negative(
    origin: &Path,
    activity: Activity,
    field: &str,
    value: Option<f64>,
) -> Result<()> {
    match value {
        Some(v) if !(v.is_finite() && v >= 0.0) => Err(Error::format(
            origin,
            format!("{activity}: {field} must be a non-negative number"),
        )),
        _ => Ok(()),
    }
}
