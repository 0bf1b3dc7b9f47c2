//! Conditioning of the anteroposterior channel before peak picking.

pub mod butterworth;

use crate::error::{Error, Result};
use crate::signal_io::{AccelSample, AccelSeries};

pub use butterworth::{design_lowpass, magnitude_response, Biquad};

/// Low-pass configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub cutoff_hz: f64,
    pub order: usize,
    /// Forward-backward application: no group delay, squared magnitude.
    pub zero_phase: bool,
}

impl Default for FilterSpec {
    fn default() -> Self {
        FilterSpec {
            cutoff_hz: 3.0,
            order: 4,
            zero_phase: true,
        }
    }
}

impl FilterSpec {
    pub fn validate(&self, rate_hz: f64) -> Result<()> {
        if ![2, 4, 6, 8].contains(&self.order) {
            return Err(Error::FilterSpec(format!(
                "order must be one of 2, 4, 6, 8 (got {})",
                self.order
            )));
        }
        if !(self.cutoff_hz.is_finite() && self.cutoff_hz > 0.0) {
            return Err(Error::FilterSpec("cutoff must be positive".into()));
        }
        if self.cutoff_hz >= rate_hz / 2.0 {
            return Err(Error::FilterSpec(format!(
                "cutoff {} Hz is not below Nyquist ({} Hz)",
                self.cutoff_hz,
                rate_hz / 2.0
            )));
        }
        Ok(())
    }

    /// Reflection length used at each end in zero-phase mode.
    pub fn pad_len(&self) -> usize {
        3 * self.order
    }
}

/// Filtered anteroposterior channel, aligned sample for sample with its
/// source series.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredSeries {
    pub t: Vec<f64>,
    pub v: Vec<f64>,
    pub spec: FilterSpec,
    pub rate_hz: f64,
    pub source_len: usize,
}

impl FilteredSeries {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }
}

/// Low-pass filters the anteroposterior (`z`) channel of a uniformly
/// sampled series.
pub fn lowpass(series: &AccelSeries, spec: &FilterSpec) -> Result<FilteredSeries> {
    if series.is_irregular() {
        return Err(Error::Irregular);
    }
    let rate = series.nominal_rate_hz();
    let v = lowpass_values(&series.anteroposterior(), rate, spec)?;
    Ok(FilteredSeries {
        t: series.times(),
        v,
        spec: *spec,
        rate_hz: rate,
        source_len: series.len(),
    })
}

/// Filters a bare sample vector taken at `rate_hz`.
pub fn lowpass_values(values: &[f64], rate_hz: f64, spec: &FilterSpec) -> Result<Vec<f64>> {
    spec.validate(rate_hz)?;
    let required = spec.pad_len() + 1;
    if values.len() < required {
        return Err(Error::TooShort {
            len: values.len(),
            required,
        });
    }
    let sections = design_lowpass(spec.order, spec.cutoff_hz, rate_hz);
    let out = if spec.zero_phase {
        butterworth::sosfiltfilt(&sections, values, spec.pad_len())
    } else {
        let mut out = values.to_vec();
        butterworth::sosfilt(&sections, &mut out, values[0]);
        out
    };
    Ok(out)
}

/// Linearly interpolates all three axes onto `t0 + k / rate_hz`. Samples
/// past the last input timestamp are not produced.
pub fn resample_uniform(series: &AccelSeries, rate_hz: f64) -> Result<AccelSeries> {
    series.require_processable()?;
    if !(rate_hz.is_finite() && rate_hz > 0.0) {
        return Err(Error::Config(format!("resample rate must be positive, got {rate_hz}")));
    }
    let src = series.samples();
    if src.windows(2).any(|w| w[1].t <= w[0].t) {
        return Err(Error::Degenerate("duplicate timestamps".into()));
    }
    let t0 = src[0].t;
    let t_end = src[src.len() - 1].t;
    // tolerate representation error in the last grid point
    let count = ((t_end - t0) * rate_hz + 1e-9).floor() as usize + 1;

    let mut out = Vec::with_capacity(count);
    let mut j = 0;
    for k in 0..count {
        let t = t0 + k as f64 / rate_hz;
        while j + 2 < src.len() && src[j + 1].t <= t {
            j += 1;
        }
        let (a, b) = (&src[j], &src[j + 1]);
        let w = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
        let lerp = |x: f64, y: f64| x + w * (y - x);
        out.push(AccelSample {
            t,
            ax: lerp(a.ax, b.ax),
            ay: lerp(a.ay, b.ay),
            az: lerp(a.az, b.az),
        });
    }
    AccelSeries::new(out, rate_hz)
}
