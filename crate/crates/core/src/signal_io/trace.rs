use std::io::Read;
use std::path::Path;

use super::{fmt6, write_file, AccelSample, AccelSeries};
use crate::error::{Error, Result};

const TRACE_HEADER: [&str; 4] = ["t", "x", "y", "z"];

/// Reads a `t,x,y,z` trace file.
pub fn parse_accel_csv(path: impl AsRef<Path>, nominal_rate_hz: f64) -> Result<AccelSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_accel_csv(file, nominal_rate_hz, path)
}

/// Reads a trace from any reader; `origin` only labels errors.
pub fn read_accel_csv<R: Read>(
    reader: R,
    nominal_rate_hz: f64,
    origin: &Path,
) -> Result<AccelSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::format(origin, e.to_string()))?
        .clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(Error::format(
            origin,
            format!("expected header `t,x,y,z`, found `{}`", header.iter().collect::<Vec<_>>().join(",")),
        ));
    }

    let mut samples = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::format(origin, format!("data row {row}: {e}")))?;
        let mut fields = [0.0f64; 4];
        for (idx, (slot, column)) in fields.iter_mut().zip(TRACE_HEADER).enumerate() {
            let raw = record.get(idx).unwrap_or("");
            *slot = raw.parse::<f64>().map_err(|_| Error::Value { row, column })?;
        }
        samples.push(AccelSample {
            t: fields[0],
            ax: fields[1],
            ay: fields[2],
            az: fields[3],
        });
    }
    AccelSeries::new(samples, nominal_rate_hz)
}

pub fn accel_csv_string(series: &AccelSeries) -> String {
    let mut out = String::with_capacity(series.len() * 40 + 8);
    out.push_str("t,x,y,z\n");
    for s in series.samples() {
        out.push_str(&fmt6(s.t));
        for v in [s.ax, s.ay, s.az] {
            out.push(',');
            out.push_str(&fmt6(v));
        }
        out.push('\n');
    }
    out
}

pub fn write_accel_csv(series: &AccelSeries, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &accel_csv_string(series))
}
