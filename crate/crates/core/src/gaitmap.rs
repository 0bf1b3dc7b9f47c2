//! Step cycles resampled onto a 0-100 % phase axis, and their composites.

use std::collections::BTreeMap;

use crate::activity::Activity;
use crate::error::{Error, Result};
use crate::signal_io::GaitMapRow;
use crate::step_detect::StepSegment;

pub const PHASE_POINTS: usize = 101;
pub const MIN_CYCLE_SAMPLES: usize = 4;

/// One IC-to-IC cycle at 1 % phase resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedCycle {
    pub subject_id: String,
    pub activity: Activity,
    pub step_index: usize,
    pub samples: [f64; PHASE_POINTS],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MapScope {
    Activity(Activity),
    AllActivities,
}

impl MapScope {
    pub fn label(&self) -> String {
        match self {
            MapScope::Activity(a) => a.label().to_string(),
            MapScope::AllActivities => "All".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeMap {
    pub subject_id: String,
    pub scope: MapScope,
    pub mean_cycle: [f64; PHASE_POINTS],
    pub sd_cycle: [f64; PHASE_POINTS],
    pub n_cycles: usize,
}

/// Resamples `raw[ic_start..=ic_end]` onto 101 phase points by linear
/// interpolation. The end points are the raw values at the two ICs.
pub fn normalize_cycle(raw: &[f64], ic_start: usize, ic_end: usize) -> Result<[f64; PHASE_POINTS]> {
    if ic_end <= ic_start || ic_end - ic_start < MIN_CYCLE_SAMPLES {
        return Err(Error::ShortCycle {
            len: ic_end.saturating_sub(ic_start),
        });
    }
    if ic_end >= raw.len() {
        return Err(Error::Config(format!(
            "cycle end {ic_end} is past the signal ({} samples)",
            raw.len()
        )));
    }
    let span = (ic_end - ic_start) as f64;
    let mut out = [0.0; PHASE_POINTS];
    for (k, slot) in out.iter_mut().enumerate() {
        let pos = span * k as f64 / (PHASE_POINTS - 1) as f64;
        let i = (pos.floor() as usize).min(ic_end - ic_start - 1);
        let w = pos - i as f64;
        let a = raw[ic_start + i];
        let b = raw[ic_start + i + 1];
        *slot = if w == 0.0 { a } else { a + w * (b - a) };
    }
    Ok(out)
}

/// Every consecutive-IC cycle of an activity. Returns the cycles and the
/// number skipped for being too short.
pub fn activity_cycles(
    subject_id: &str,
    activity: Activity,
    raw: &[f64],
    segments: &[StepSegment],
) -> (Vec<NormalizedCycle>, usize) {
    let mut cycles = Vec::new();
    let mut skipped = 0;
    for pair in segments.windows(2) {
        match normalize_cycle(raw, pair[0].ic_idx, pair[1].ic_idx) {
            Ok(samples) => cycles.push(NormalizedCycle {
                subject_id: subject_id.to_string(),
                activity,
                step_index: pair[0].index,
                samples,
            }),
            Err(_) => skipped += 1,
        }
    }
    (cycles, skipped)
}

/// Pointwise mean and population standard deviation.
pub fn composite(cycles: &[NormalizedCycle]) -> Result<CompositeMap> {
    let first = cycles.first().ok_or(Error::Empty("no cycles to composite"))?;
    let scope = if cycles.iter().all(|c| c.activity == first.activity) {
        MapScope::Activity(first.activity)
    } else {
        MapScope::AllActivities
    };
    let n = cycles.len() as f64;
    let mut mean = [0.0; PHASE_POINTS];
    let mut sd = [0.0; PHASE_POINTS];
    for k in 0..PHASE_POINTS {
        let m = cycles.iter().map(|c| c.samples[k]).sum::<f64>() / n;
        let var = cycles.iter().map(|c| (c.samples[k] - m).powi(2)).sum::<f64>() / n;
        mean[k] = m;
        sd[k] = var.sqrt();
    }
    Ok(CompositeMap {
        subject_id: first.subject_id.clone(),
        scope,
        mean_cycle: mean,
        sd_cycle: sd,
        n_cycles: cycles.len(),
    })
}

/// Per-activity composites plus one across all activities, per subject.
pub fn subject_maps(cycles: &[NormalizedCycle]) -> Vec<CompositeMap> {
    let mut by_subject: BTreeMap<&str, BTreeMap<Activity, Vec<NormalizedCycle>>> = BTreeMap::new();
    for c in cycles {
        by_subject
            .entry(&c.subject_id)
            .or_default()
            .entry(c.activity)
            .or_default()
            .push(c.clone());
    }
    let mut maps = Vec::new();
    for per_activity in by_subject.values() {
        let mut all = Vec::new();
        for group in per_activity.values() {
            if let Ok(m) = composite(group) {
                maps.push(m);
            }
            all.extend(group.iter().cloned());
        }
        if let Ok(mut m) = composite(&all) {
            m.scope = MapScope::AllActivities;
            maps.push(m);
        }
    }
    maps
}

pub fn map_rows(maps: &[CompositeMap]) -> Vec<GaitMapRow> {
    maps.iter()
        .flat_map(|m| {
            (0..PHASE_POINTS).map(move |k| GaitMapRow {
                subject_id: m.subject_id.clone(),
                activity: m.scope.label(),
                phase_pct: k as u32,
                mean_g: m.mean_cycle[k],
                sd_g: m.sd_cycle[k],
                n_cycles: m.n_cycles,
            })
        })
        .collect()
}
