//! End-to-end processing: trace → filtered signal → steps → model →
//! estimates, plus the file-level operations behind the command line.

use std::fs;
use std::path::{Path, PathBuf};

use crate::activity::{Activity, Cohort};
use crate::calibration::{build_points, fit, CalibrationInput, CalibrationModel, ModelForm};
use crate::error::{Error, Result};
use crate::estimate::{estimate_activity, ActivityEstimate};
use crate::gaitmap::{activity_cycles, map_rows, subject_maps, NormalizedCycle};
use crate::metrics::{build_report, pairs_from_estimates, GroupingSpec, MetricsReport};
use crate::preprocess::{lowpass, resample_uniform, FilterSpec, FilteredSeries};
use crate::signal_io::{
    parse_accel_csv, parse_estimates_csv, parse_manifest, read_file, write_estimates_csv,
    write_events_csv, ActivityRecord, AccelSeries, EstimateRow, EventRow, GaitMapRow,
};
use crate::step_detect::{detect_ic, event_rows, find_peaks, segment_steps, PeakParams, StepSegment};

/// Filter and peak-picking settings shared by every command.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DetectionConfig {
    pub filter: FilterSpec,
    pub peaks: PeakParams,
}

impl DetectionConfig {
    pub fn validate(&self, rate_hz: f64) -> Result<()> {
        self.filter.validate(rate_hz)?;
        self.peaks.validate(rate_hz)
    }
}

/// One trace after step detection.
#[derive(Debug, Clone)]
pub struct ProcessedSeries {
    /// Timestamps of the processed (possibly resampled) series.
    pub t: Vec<f64>,
    pub raw_ap: Vec<f64>,
    pub filtered: FilteredSeries,
    pub peaks: Vec<usize>,
    pub segments: Vec<StepSegment>,
    /// The input was irregular and was resampled to its nominal rate.
    pub resampled: bool,
}

impl ProcessedSeries {
    pub fn step_count(&self) -> usize {
        self.segments.len()
    }

    pub fn events(&self, step_lengths: Option<&[f64]>) -> Vec<EventRow> {
        event_rows(&self.segments, &self.t, step_lengths)
    }
}

/// Detects steps and initial contacts in one series. Irregularly sampled
/// input is resampled to its nominal rate first, with a warning.
pub fn process_series(series: &AccelSeries, config: &DetectionConfig) -> Result<ProcessedSeries> {
    let rate = series.nominal_rate_hz();
    config.validate(rate)?;
    let resampled = series.is_irregular();
    let owned;
    let series = if resampled {
        log::warn!(
            "irregular sampling (median interval {:?} s); resampling to {rate} Hz",
            series.median_interval()
        );
        owned = resample_uniform(series, rate)?;
        &owned
    } else {
        series
    };
    let filtered = lowpass(series, &config.filter)?;
    let peaks = find_peaks(&filtered, &config.peaks);
    let t = series.times();
    let raw_ap = series.anteroposterior();
    let windows = segment_steps(raw_ap.len(), &peaks);
    let segments = detect_ic(&raw_ap, &t, &windows, &peaks);
    let degraded = segments.iter().filter(|s| s.degraded).count();
    if degraded > 0 {
        log::warn!("{degraded} step windows had no raw local maximum; used window argmax");
    }
    Ok(ProcessedSeries {
        t,
        raw_ap,
        filtered,
        peaks,
        segments,
        resampled,
    })
}

/// Fits a subject's model from the calibration activities among `records`.
/// Non-calibration records are ignored.
pub fn calibrate_records(
    subject_id: &str,
    records: &[ActivityRecord],
    config: &DetectionConfig,
    form: ModelForm,
) -> Result<CalibrationModel> {
    let mut processed = Vec::new();
    for r in records.iter().filter(|r| r.activity.is_calibration()) {
        let distance = r.truth.observed_distance_m.ok_or(Error::Incomplete {
            activity: r.activity,
            field: "observed_distance_m",
        })?;
        processed.push((r.activity, distance, process_series(&r.series, config)?));
    }
    let inputs: Vec<CalibrationInput<'_>> = processed
        .iter()
        .map(|(activity, distance, p)| CalibrationInput {
            activity: *activity,
            observed_distance_m: *distance,
            segments: &p.segments,
        })
        .collect();
    let points = build_points(&inputs)?;
    fit(subject_id, &points, form)
}

/// One activity's detection and estimates.
#[derive(Debug, Clone)]
pub struct ActivityResult {
    pub record: ActivityRecord,
    pub processed: ProcessedSeries,
    pub estimate: ActivityEstimate,
}

impl ActivityResult {
    pub fn row(&self, cohort: Option<Cohort>) -> EstimateRow {
        let e = &self.estimate;
        EstimateRow {
            subject_id: self.record.subject_id.clone(),
            cohort,
            activity: e.activity,
            step_count: e.step_count,
            distance_m: e.distance_m,
            avg_step_length_m: e.avg_step_length_m,
            avg_step_duration_s: e.rates.map(|r| r.avg_step_duration_s),
            cadence_steps_per_min: e.rates.map(|r| r.cadence_steps_per_min),
            speed_m_per_s: e.rates.map(|r| r.speed_m_per_s),
            extrapolated_step_fraction: e.extrapolated_step_fraction,
            observed_steps: self.record.truth.observed_steps,
            observed_distance_m: self.record.truth.observed_distance_m,
            observed_duration_s: self.record.truth.observed_duration_s,
            pedometer_steps: self.record.pedometer.steps,
            pedometer_distance_m: self.record.pedometer.distance_m,
        }
    }

    pub fn events(&self) -> Vec<EventRow> {
        self.processed.events(Some(&self.estimate.step_lengths_m))
    }
}

/// Applies a model to every record.
pub fn analyze_records(
    records: &[ActivityRecord],
    model: &CalibrationModel,
    config: &DetectionConfig,
) -> Result<Vec<ActivityResult>> {
    records
        .iter()
        .map(|r| {
            let processed = process_series(&r.series, config)?;
            let estimate = estimate_activity(r.activity, model, &processed.segments, &processed.t)?;
            Ok(ActivityResult {
                record: r.clone(),
                processed,
                estimate,
            })
        })
        .collect()
}

/// Events of a single trace file.
pub fn trace_events(path: impl AsRef<Path>, rate_hz: f64, config: &DetectionConfig) -> Result<Vec<EventRow>> {
    let series = parse_accel_csv(path, rate_hz)?;
    Ok(process_series(&series, config)?.events(None))
}

/// Loads a manifest and fits the subject's model.
pub fn calibrate_manifest(
    manifest: impl AsRef<Path>,
    config: &DetectionConfig,
    form: ModelForm,
) -> Result<CalibrationModel> {
    let manifest = parse_manifest(manifest)?;
    calibrate_records(&manifest.subject_id, &manifest.load_records()?, config, form)
}

/// Output of [`analyze_manifest`].
#[derive(Debug, Clone)]
pub struct AnalyzeOutput {
    pub estimates_csv: PathBuf,
    pub events_csvs: Vec<PathBuf>,
    pub rows: Vec<EstimateRow>,
}

pub const ESTIMATES_FILE: &str = "estimates.csv";

/// Writes `estimates.csv` and one `events_<activity>.csv` per activity.
pub fn analyze_manifest(
    manifest: impl AsRef<Path>,
    model: &CalibrationModel,
    out_dir: impl AsRef<Path>,
    config: &DetectionConfig,
) -> Result<AnalyzeOutput> {
    let manifest = parse_manifest(manifest)?;
    if model.subject_id != manifest.subject_id {
        log::warn!(
            "model subject {} differs from manifest subject {}",
            model.subject_id,
            manifest.subject_id
        );
    }
    let results = analyze_records(&manifest.load_records()?, model, config)?;
    let out_dir = out_dir.as_ref();
    let mut events_csvs = Vec::with_capacity(results.len());
    for r in &results {
        let path = out_dir.join(format!("events_{}.csv", r.record.activity.label()));
        write_events_csv(&r.events(), &path)?;
        events_csvs.push(path);
    }
    let rows: Vec<EstimateRow> = results.iter().map(|r| r.row(manifest.cohort)).collect();
    let estimates_csv = out_dir.join(ESTIMATES_FILE);
    write_estimates_csv(&rows, &estimates_csv)?;
    Ok(AnalyzeOutput {
        estimates_csv,
        events_csvs,
        rows,
    })
}

/// Normalized IC-to-IC cycles of every activity in `records`.
pub fn record_cycles(records: &[ActivityRecord], config: &DetectionConfig) -> Result<Vec<NormalizedCycle>> {
    let mut cycles = Vec::new();
    for r in records {
        let p = process_series(&r.series, config)?;
        let (mut c, skipped) = activity_cycles(&r.subject_id, r.activity, &p.raw_ap, &p.segments);
        if skipped > 0 {
            log::info!("{} {}: skipped {skipped} short cycles", r.subject_id, r.activity);
        }
        cycles.append(&mut c);
    }
    Ok(cycles)
}

/// Per-activity and all-activity gait maps of one manifest.
pub fn gaitmap_manifest(manifest: impl AsRef<Path>, config: &DetectionConfig) -> Result<Vec<GaitMapRow>> {
    let manifest = parse_manifest(manifest)?;
    let cycles = record_cycles(&manifest.load_records()?, config)?;
    Ok(map_rows(&subject_maps(&cycles)))
}

/// Every `estimates.csv` under `dir`, in path order.
pub fn collect_estimates(dir: impl AsRef<Path>) -> Result<Vec<EstimateRow>> {
    let mut files = Vec::new();
    find_files(dir.as_ref(), ESTIMATES_FILE, &mut files)?;
    files.sort();
    if files.is_empty() {
        return Err(Error::Empty("no estimates.csv under the results directory"));
    }
    let mut rows = Vec::new();
    for f in files {
        rows.extend(parse_estimates_csv(&read_file(&f)?, &f)?);
    }
    Ok(rows)
}

fn find_files(dir: &Path, name: &str, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            find_files(&path, name, out)?;
        } else if path.file_name().is_some_and(|n| n == name) {
            out.push(path);
        }
    }
    Ok(())
}

/// Report over every estimates file below `dir`.
pub fn report_dir(dir: impl AsRef<Path>, spec: &GroupingSpec) -> Result<MetricsReport> {
    let rows = collect_estimates(dir)?;
    Ok(build_report(&pairs_from_estimates(&rows), spec))
}

/// Calibrates on the calibration activities and evaluates every activity
/// of an in-memory session.
pub fn run_session(
    subject_id: &str,
    records: &[ActivityRecord],
    config: &DetectionConfig,
    form: ModelForm,
) -> Result<(CalibrationModel, Vec<ActivityResult>)> {
    let model = calibrate_records(subject_id, records, config, form)?;
    let results = analyze_records(records, &model, config)?;
    Ok((model, results))
}

/// Activities of `results` in a given set, for protocol-style summaries.
pub fn select<'a>(results: &'a [ActivityResult], keep: impl Fn(Activity) -> bool + 'a) -> impl Iterator<Item = &'a ActivityResult> + 'a {
    results.iter().filter(move |r| keep(r.record.activity))
}
