use std::path::Path;

use super::{fmt6, read_file, write_file};
use crate::activity::{Activity, Cohort};
use crate::error::{Error, Result};
use crate::metrics::{ReportRow, P_VALUE_FLOOR};

pub const EVENTS_HEADER: &str = "step_index,start_t,to_t,ic_t,end_t,ic_peak_g,step_length_m";
pub const ESTIMATES_HEADER: &str = "subject_id,cohort,activity,step_count,distance_m,avg_step_length_m,avg_step_duration_s,cadence_steps_per_min,speed_m_per_s,extrapolated_step_fraction,observed_steps,observed_distance_m,observed_duration_s,pedometer_steps,pedometer_distance_m";
pub const REPORT_HEADER: &str = "activity_set,cohort,source,quantity,n,gt_total,error_rate_pct,mean_pct_error,sd_pct_error,pearson_r,p_value,adjusted_r2";
pub const GAITMAP_HEADER: &str = "subject_id,activity,phase_pct,mean_g,sd_g,n_cycles";

/// One detected step as written to an events file. `to_t` is the window
/// start boundary; `step_length_m` stays blank until a model is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRow {
    pub step_index: usize,
    pub start_t: f64,
    pub to_t: f64,
    pub ic_t: f64,
    pub end_t: f64,
    pub ic_peak_g: f64,
    pub step_length_m: Option<f64>,
}

/// Per-activity estimate next to its annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub subject_id: String,
    pub cohort: Option<Cohort>,
    pub activity: Activity,
    pub step_count: usize,
    pub distance_m: f64,
    pub avg_step_length_m: Option<f64>,
    pub avg_step_duration_s: Option<f64>,
    pub cadence_steps_per_min: Option<f64>,
    pub speed_m_per_s: Option<f64>,
    pub extrapolated_step_fraction: f64,
    pub observed_steps: Option<u64>,
    pub observed_distance_m: Option<f64>,
    pub observed_duration_s: Option<f64>,
    pub pedometer_steps: Option<u64>,
    pub pedometer_distance_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaitMapRow {
    pub subject_id: String,
    /// Activity label, or `All` for the cross-activity composite.
    pub activity: String,
    pub phase_pct: u32,
    pub mean_g: f64,
    pub sd_g: f64,
    pub n_cycles: usize,
}

fn opt6(v: Option<f64>) -> String {
    v.map(fmt6).unwrap_or_default()
}

fn opt_int(v: Option<u64>) -> String {
    v.map(|n| n.to_string()).unwrap_or_default()
}

fn format_p(p: Option<f64>) -> String {
    match p {
        None => String::new(),
        Some(p) if p < P_VALUE_FLOOR => "<1e-15".to_string(),
        Some(p) => format!("{p:.6e}"),
    }
}

pub fn events_csv_string(rows: &[EventRow]) -> String {
    let mut out = String::from(EVENTS_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            r.step_index.to_string(),
            fmt6(r.start_t),
            fmt6(r.to_t),
            fmt6(r.ic_t),
            fmt6(r.end_t),
            fmt6(r.ic_peak_g),
            opt6(r.step_length_m),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn write_events_csv(rows: &[EventRow], path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &events_csv_string(rows))
}

fn estimate_line(r: &EstimateRow) -> String {
    [
        r.subject_id.clone(),
        r.cohort.map(|c| c.label().to_string()).unwrap_or_default(),
        r.activity.label().to_string(),
        r.step_count.to_string(),
        fmt6(r.distance_m),
        opt6(r.avg_step_length_m),
        opt6(r.avg_step_duration_s),
        opt6(r.cadence_steps_per_min),
        opt6(r.speed_m_per_s),
        fmt6(r.extrapolated_step_fraction),
        opt_int(r.observed_steps),
        opt6(r.observed_distance_m),
        opt6(r.observed_duration_s),
        opt_int(r.pedometer_steps),
        opt6(r.pedometer_distance_m),
    ]
    .join(",")
}

pub fn write_estimates_csv(rows: &[EstimateRow], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from(ESTIMATES_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&estimate_line(r));
        out.push('\n');
    }
    write_file(path.as_ref(), &out)
}

pub fn report_csv_string(rows: &[ReportRow]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            r.activity_set.to_string(),
            r.cohort.to_string(),
            r.source.to_string(),
            r.quantity.to_string(),
            r.n.to_string(),
            fmt6(r.gt_total),
            opt6(r.error_rate_pct),
            opt6(r.mean_pct_error),
            opt6(r.sd_pct_error),
            opt6(r.pearson_r),
            format_p(r.p_value),
            opt6(r.adjusted_r2),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn write_report(rows: &[ReportRow], path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &report_csv_string(rows))
}

pub fn gaitmap_csv_string(rows: &[GaitMapRow]) -> String {
    let mut out = String::from(GAITMAP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.subject_id,
            r.activity,
            r.phase_pct,
            fmt6(r.mean_g),
            fmt6(r.sd_g),
            r.n_cycles
        ));
    }
    out
}

pub fn write_gaitmap_csv(rows: &[GaitMapRow], path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &gaitmap_csv_string(rows))
}

struct Table<'a> {
    origin: &'a Path,
    records: Vec<csv::StringRecord>,
}

impl<'a> Table<'a> {
    fn parse(text: &str, header: &str, origin: &'a Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let found = rdr
            .headers()
            .map_err(|e| Error::format(origin, e.to_string()))?
            .iter()
            .collect::<Vec<_>>()
            .join(",");
        if found != header {
            return Err(Error::format(origin, format!("expected header `{header}`")));
        }
        let records = rdr
            .records()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::format(origin, e.to_string()))?;
        Ok(Table { origin, records })
    }

    fn bad(&self, row: usize, col: usize) -> Error {
        Error::format(self.origin, format!("data row {}: bad value in column {}", row + 1, col + 1))
    }

    fn str(&self, row: usize, col: usize) -> &str {
        self.records[row].get(col).unwrap_or("")
    }

    fn parsed<T: std::str::FromStr>(&self, row: usize, col: usize) -> Result<T> {
        self.str(row, col).parse().map_err(|_| self.bad(row, col))
    }

    fn optional<T: std::str::FromStr>(&self, row: usize, col: usize) -> Result<Option<T>> {
        match self.str(row, col) {
            "" => Ok(None),
            s => s.parse().map(Some).map_err(|_| self.bad(row, col)),
        }
    }
}

pub fn parse_events_csv(text: &str, origin: &Path) -> Result<Vec<EventRow>> {
    let t = Table::parse(text, EVENTS_HEADER, origin)?;
    (0..t.records.len())
        .map(|i| {
            Ok(EventRow {
                step_index: t.parsed(i, 0)?,
                start_t: t.parsed(i, 1)?,
                to_t: t.parsed(i, 2)?,
                ic_t: t.parsed(i, 3)?,
                end_t: t.parsed(i, 4)?,
                ic_peak_g: t.parsed(i, 5)?,
                step_length_m: t.optional(i, 6)?,
            })
        })
        .collect()
}

pub fn read_events_csv(path: impl AsRef<Path>) -> Result<Vec<EventRow>> {
    let path = path.as_ref();
    parse_events_csv(&read_file(path)?, path)
}

pub fn parse_estimates_csv(text: &str, origin: &Path) -> Result<Vec<EstimateRow>> {
    let t = Table::parse(text, ESTIMATES_HEADER, origin)?;
    (0..t.records.len())
        .map(|i| {
            let cohort = match t.str(i, 1) {
                "" => None,
                s => Some(s.parse()?),
            };
            Ok(EstimateRow {
                subject_id: t.str(i, 0).to_string(),
                cohort,
                activity: t.str(i, 2).parse()?,
                step_count: t.parsed(i, 3)?,
                distance_m: t.parsed(i, 4)?,
                avg_step_length_m: t.optional(i, 5)?,
                avg_step_duration_s: t.optional(i, 6)?,
                cadence_steps_per_min: t.optional(i, 7)?,
                speed_m_per_s: t.optional(i, 8)?,
                extrapolated_step_fraction: t.parsed(i, 9)?,
                observed_steps: t.optional(i, 10)?,
                observed_distance_m: t.optional(i, 11)?,
                observed_duration_s: t.optional(i, 12)?,
                pedometer_steps: t.optional(i, 13)?,
                pedometer_distance_m: t.optional(i, 14)?,
            })
        })
        .collect()
}

pub fn parse_report_csv(text: &str, origin: &Path) -> Result<Vec<ReportRow>> {
    let t = Table::parse(text, REPORT_HEADER, origin)?;
    (0..t.records.len())
        .map(|i| {
            let p_value = match t.str(i, 10) {
                "" => None,
                "<1e-15" => Some(0.0),
                s => Some(s.parse().map_err(|_| t.bad(i, 10))?),
            };
            Ok(ReportRow {
                activity_set: t.parsed(i, 0)?,
                cohort: t.parsed(i, 1)?,
                source: t.parsed(i, 2)?,
                quantity: t.parsed(i, 3)?,
                n: t.parsed(i, 4)?,
                gt_total: t.parsed(i, 5)?,
                error_rate_pct: t.optional(i, 6)?,
                mean_pct_error: t.optional(i, 7)?,
                sd_pct_error: t.optional(i, 8)?,
                pearson_r: t.optional(i, 9)?,
                p_value,
                adjusted_r2: t.optional(i, 11)?,
            })
        })
        .collect()
}

pub fn read_report_csv(path: impl AsRef<Path>) -> Result<Vec<ReportRow>> {
    let path = path.as_ref();
    parse_report_csv(&read_file(path)?, path)
}
