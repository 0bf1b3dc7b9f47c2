//! Clinical features derived from detected steps and a calibration model.

use crate::activity::Activity;
use crate::calibration::CalibrationModel;
use crate::error::{Error, Result};
use crate::step_detect::{step_durations, StepSegment};

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceEstimate {
    pub distance_m: f64,
    pub step_lengths_m: Vec<f64>,
    pub extrapolated_steps: usize,
    /// No steps were supplied; distance is zero by convention.
    pub empty: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub cadence_steps_per_min: f64,
    pub speed_m_per_s: f64,
    pub avg_step_duration_s: f64,
    /// First window start to last window end.
    pub active_duration_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivityEstimate {
    pub activity: Activity,
    pub step_count: usize,
    pub distance_m: f64,
    pub step_lengths_m: Vec<f64>,
    pub avg_step_length_m: Option<f64>,
    pub rates: Option<Rates>,
    pub extrapolated_step_fraction: f64,
}

/// Sums the model's per-step predictions.
pub fn estimate_distance(model: &CalibrationModel, segments: &[StepSegment]) -> DistanceEstimate {
    let predictions: Vec<_> = segments.iter().map(|s| model.predict(s.ic_peak_g)).collect();
    DistanceEstimate {
        distance_m: predictions.iter().map(|p| p.length_m).sum(),
        step_lengths_m: predictions.iter().map(|p| p.length_m).collect(),
        extrapolated_steps: predictions.iter().filter(|p| p.flagged()).count(),
        empty: segments.is_empty(),
    }
}

pub fn average_step_length(distance_m: f64, step_count: usize) -> Result<f64> {
    if step_count == 0 {
        return Err(Error::UndefinedAverage);
    }
    Ok(distance_m / step_count as f64)
}

/// Cadence, speed and mean step duration over the active span of the
/// steps. Idle time before the first and after the last window is ignored.
pub fn derive_rates(segments: &[StepSegment], t: &[f64], distance_m: f64) -> Result<Rates> {
    let (first, last) = match (segments.first(), segments.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::Empty("no steps to derive rates from")),
    };
    let at = |i: usize| t[i.min(t.len() - 1)];
    let active = at(last.end_idx) - at(first.start_idx);
    if active <= 0.0 {
        return Err(Error::Degenerate("active duration is zero".into()));
    }
    let durations = step_durations(segments, t);
    Ok(Rates {
        cadence_steps_per_min: 60.0 * segments.len() as f64 / active,
        speed_m_per_s: distance_m / active,
        avg_step_duration_s: durations.iter().sum::<f64>() / durations.len() as f64,
        active_duration_s: active,
    })
}

/// All features of one activity.
pub fn estimate_activity(
    activity: Activity,
    model: &CalibrationModel,
    segments: &[StepSegment],
    t: &[f64],
) -> Result<ActivityEstimate> {
    let distance = estimate_distance(model, segments);
    let n = segments.len();
    let rates = if n == 0 {
        None
    } else {
        Some(derive_rates(segments, t, distance.distance_m)?)
    };
    Ok(ActivityEstimate {
        activity,
        step_count: n,
        distance_m: distance.distance_m,
        avg_step_length_m: average_step_length(distance.distance_m, n).ok(),
        rates,
        extrapolated_step_fraction: if n == 0 {
            0.0
        } else {
            distance.extrapolated_steps as f64 / n as f64
        },
        step_lengths_m: distance.step_lengths_m,
    })
}
