//! Step counting and gait-event localization.
//!
//! Steps are peaks of the low-passed anteroposterior signal. The midpoint
//! between consecutive filtered peaks bounds each step (and is reported as
//! toe-off); initial contact is the largest raw-signal local maximum inside
//! each step window.

use crate::error::{Error, Result};
use crate::preprocess::FilteredSeries;
use crate::signal_io::{median, EventRow};

/// Peak selection thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakParams {
    pub min_separation_s: f64,
    pub min_prominence_g: f64,
}

impl Default for PeakParams {
    fn default() -> Self {
        PeakParams {
            min_separation_s: 0.25,
            min_prominence_g: 0.05,
        }
    }
}

impl PeakParams {
    pub fn validate(&self, rate_hz: f64) -> Result<()> {
        if !(self.min_prominence_g.is_finite() && self.min_prominence_g >= 0.0) {
            return Err(Error::Config("min_prominence_g must be non-negative".into()));
        }
        if !(self.min_separation_s.is_finite() && self.min_separation_s * rate_hz >= 2.0) {
            return Err(Error::Config(format!(
                "min_separation_s must span at least 2 samples at {rate_hz} Hz"
            )));
        }
        Ok(())
    }

    /// Minimum index distance between retained peaks.
    pub fn separation_samples(&self, rate_hz: f64) -> usize {
        (self.min_separation_s * rate_hz - 1e-9).ceil().max(1.0) as usize
    }
}

/// One detected step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSegment {
    pub index: usize,
    pub start_idx: usize,
    /// Exclusive; equals the next segment's `start_idx`.
    pub end_idx: usize,
    pub filtered_peak_idx: usize,
    /// Toe-off, placed at the window start.
    pub to_idx: usize,
    pub ic_idx: usize,
    pub ic_peak_g: f64,
    pub duration_s: f64,
    /// The window had no interior local maximum; `ic_idx` is its argmax.
    pub degraded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    InitialContact,
    ToeOff,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitEvent {
    pub kind: EventKind,
    pub t: f64,
    pub sample_idx: usize,
    pub amplitude_g: f64,
    /// Toe-off comes from the inter-peak midpoint rule rather than a
    /// signal feature, so it is marked inferred.
    pub inferred: bool,
}

/// Indices of the local maxima of `v` (flat tops report their middle
/// sample, rounded down).
fn local_maxima(v: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let n = v.len();
    let mut i = 1;
    while i + 1 < n {
        if v[i] > v[i - 1] {
            let mut j = i;
            while j + 1 < n && v[j + 1] == v[i] {
                j += 1;
            }
            if j + 1 < n && v[j + 1] < v[i] {
                out.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Topographic prominence of the peak at `p`.
fn prominence(v: &[f64], p: usize) -> f64 {
    let h = v[p];
    let mut left_min = h;
    for i in (0..p).rev() {
        if v[i] > h {
            break;
        }
        left_min = left_min.min(v[i]);
    }
    let mut right_min = h;
    for &x in &v[p + 1..] {
        if x > h {
            break;
        }
        right_min = right_min.min(x);
    }
    h - left_min.max(right_min)
}

/// Peaks of the filtered signal: local maxima with enough prominence,
/// thinned so no two are closer than the minimum separation. Within a
/// conflict the higher peak wins, ties go to the earlier index.
pub fn find_peaks(filtered: &FilteredSeries, params: &PeakParams) -> Vec<usize> {
    find_peaks_in(&filtered.v, filtered.rate_hz, params)
}

pub fn find_peaks_in(v: &[f64], rate_hz: f64, params: &PeakParams) -> Vec<usize> {
    let candidates: Vec<usize> = local_maxima(v)
        .into_iter()
        .filter(|&p| prominence(v, p) >= params.min_prominence_g)
        .collect();
    let distance = params.separation_samples(rate_hz);

    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| v[candidates[b]].total_cmp(&v[candidates[a]]).then(a.cmp(&b)));
    let mut keep = vec![true; candidates.len()];
    for &i in &order {
        if !keep[i] {
            continue;
        }
        let p = candidates[i];
        for j in (0..i).rev() {
            if p - candidates[j] >= distance {
                break;
            }
            keep[j] = false;
        }
        for j in i + 1..candidates.len() {
            if candidates[j] - p >= distance {
                break;
            }
            keep[j] = false;
        }
    }
    candidates
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

pub fn count_steps(filtered: &FilteredSeries, params: &PeakParams) -> usize {
    find_peaks(filtered, params).len()
}

/// Step windows `(start_idx, end_idx)` over a series of `len` samples.
///
/// Interior boundaries sit at `floor((p[i] + p[i+1]) / 2)`. The first and
/// last windows extend half the median inter-peak gap beyond the outer
/// peaks, clamped to the series; a lone peak takes the whole series.
pub fn segment_steps(len: usize, peaks: &[usize]) -> Vec<(usize, usize)> {
    if peaks.is_empty() || len == 0 {
        return Vec::new();
    }
    let last_idx = len - 1;
    let (first, last) = (peaks[0], peaks[peaks.len() - 1]);
    let (lead, tail) = if peaks.len() == 1 {
        (first, last_idx - last.min(last_idx))
    } else {
        let mut gaps: Vec<f64> = peaks.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
        let half = (median(&mut gaps) / 2.0).round() as usize;
        (half, half)
    };

    let mut bounds = Vec::with_capacity(peaks.len() + 1);
    bounds.push(first.saturating_sub(lead));
    bounds.extend(peaks.windows(2).map(|w| (w[0] + w[1]) / 2));
    bounds.push((last + tail).min(last_idx).max(last + 1).min(len));
    bounds.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Locates initial contact in every window and assembles the segments.
///
/// `filtered_peaks` pairs one-to-one with `windows`; `t` supplies the
/// timestamps used for step durations.
pub fn detect_ic(
    raw_ap: &[f64],
    t: &[f64],
    windows: &[(usize, usize)],
    filtered_peaks: &[usize],
) -> Vec<StepSegment> {
    let mut segments: Vec<StepSegment> = windows
        .iter()
        .enumerate()
        .map(|(index, &(start, end))| {
            let (ic_idx, degraded) = window_ic(raw_ap, start, end);
            StepSegment {
                index,
                start_idx: start,
                end_idx: end,
                filtered_peak_idx: filtered_peaks.get(index).copied().unwrap_or(ic_idx),
                to_idx: start,
                ic_idx,
                ic_peak_g: raw_ap[ic_idx],
                duration_s: 0.0,
                degraded,
            }
        })
        .collect();
    let durations = step_durations(&segments, t);
    for (s, d) in segments.iter_mut().zip(durations) {
        s.duration_s = d;
    }
    segments
}

fn window_ic(raw: &[f64], start: usize, end: usize) -> (usize, bool) {
    let end = end.max(start + 1).min(raw.len());
    let is_local_max =
        |i: usize| i > 0 && i + 1 < raw.len() && raw[i] > raw[i - 1] && raw[i] >= raw[i + 1];
    let best = |iter: &mut dyn Iterator<Item = usize>| {
        iter.fold(None, |acc: Option<usize>, i| match acc {
            Some(b) if raw[b] >= raw[i] => Some(b),
            _ => Some(i),
        })
    };
    match best(&mut (start..end).filter(|&i| is_local_max(i))) {
        Some(i) => (i, false),
        None => (best(&mut (start..end)).unwrap_or(start), true),
    }
}

/// IC-to-IC durations; the last step runs from its IC to its window end.
pub fn step_durations(segments: &[StepSegment], t: &[f64]) -> Vec<f64> {
    let at = |i: usize| t[i.min(t.len() - 1)];
    segments
        .iter()
        .enumerate()
        .map(|(i, s)| match segments.get(i + 1) {
            Some(next) => at(next.ic_idx) - at(s.ic_idx),
            None => at(s.end_idx) - at(s.ic_idx),
        })
        .collect()
}

/// Alternating TO / IC events for a list of segments.
pub fn gait_events(segments: &[StepSegment], t: &[f64], raw_ap: &[f64]) -> Vec<GaitEvent> {
    segments
        .iter()
        .flat_map(|s| {
            [
                GaitEvent {
                    kind: EventKind::ToeOff,
                    t: t[s.to_idx],
                    sample_idx: s.to_idx,
                    amplitude_g: raw_ap[s.to_idx],
                    inferred: true,
                },
                GaitEvent {
                    kind: EventKind::InitialContact,
                    t: t[s.ic_idx],
                    sample_idx: s.ic_idx,
                    amplitude_g: s.ic_peak_g,
                    inferred: false,
                },
            ]
        })
        .collect()
}

/// Rows for the events file. `lengths`, when given, pairs with `segments`.
pub fn event_rows(segments: &[StepSegment], t: &[f64], lengths: Option<&[f64]>) -> Vec<EventRow> {
    let at = |i: usize| t[i.min(t.len() - 1)];
    segments
        .iter()
        .enumerate()
        .map(|(i, s)| EventRow {
            step_index: s.index,
            start_t: at(s.start_idx),
            to_t: at(s.to_idx),
            ic_t: at(s.ic_idx),
            end_t: at(s.end_idx),
            ic_peak_g: s.ic_peak_g,
            step_length_m: lengths.map(|l| l[i]),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn filtered(v: Vec<f64>) -> FilteredSeries {
        let n = v.len();
        FilteredSeries {
            t: (0..n).map(|k| k as f64 / 100.0).collect(),
            v,
            spec: Default::default(),
            rate_hz: 100.0,
            source_len: n,
        }
    }

    #[test]
    fn zero_signal_has_no_peaks() {
        let f = filtered(vec![0.0; 500]);
        assert!(find_peaks(&f, &PeakParams::default()).is_empty());
        assert_eq!(count_steps(&f, &PeakParams::default()), 0);
    }

    #[test]
    fn sine_peaks_at_cycle_argmax() {
        let v: Vec<f64> = (0..1000)
            .map(|k| (2.0 * PI * k as f64 / 100.0).sin())
            .collect();
        // oracle: argmax within each 100-sample cycle
        let expected: Vec<usize> = (0..10)
            .map(|c| {
                (c * 100..(c + 1) * 100)
                    .max_by(|&a, &b| v[a].total_cmp(&v[b]))
                    .unwrap()
            })
            .collect();
        let got = find_peaks(&filtered(v), &PeakParams::default());
        assert_eq!(got, expected);
    }

    #[test]
    fn separation_keeps_higher_bump() {
        let v: Vec<f64> = (0..300)
            .map(|k| {
                let t = k as f64 / 100.0;
                let g = |c: f64, a: f64| a * (-((t - c) / 0.02).powi(2)).exp();
                g(1.0, 1.0) + g(1.1, 0.8)
            })
            .collect();
        let got = find_peaks(&filtered(v), &PeakParams::default());
        assert_eq!(got, vec![100]);
    }

    #[test]
    fn separation_tie_keeps_earlier() {
        let mut v = vec![0.0; 100];
        v[40] = 1.0;
        v[50] = 1.0;
        let got = find_peaks(&filtered(v), &PeakParams::default());
        assert_eq!(got, vec![40]);
    }

    #[test]
    fn prominence_filters_ripple() {
        let v: Vec<f64> = (0..1000)
            .map(|k| {
                let t = k as f64 / 100.0;
                (2.0 * PI * t).sin() + 0.01 * (2.0 * PI * 7.3 * t).sin()
            })
            .collect();
        assert_eq!(find_peaks(&filtered(v), &PeakParams::default()).len(), 10);
    }

    #[test]
    fn plateau_reports_middle() {
        let v = vec![0.0, 1.0, 2.0, 2.0, 2.0, 2.0, 1.0, 0.0];
        assert_eq!(local_maxima(&v), vec![3]);
        let edge = vec![0.0, 1.0, 1.0];
        assert!(local_maxima(&edge).is_empty());
    }

    #[test]
    fn midpoint_boundaries() {
        assert_eq!(segment_steps(400, &[100, 200]), vec![(50, 150), (150, 250)]);
        assert_eq!(segment_steps(400, &[100, 201]), vec![(49, 150), (150, 252)]);
        assert!(segment_steps(400, &[]).is_empty());
    }

    #[test]
    fn outer_windows_are_clamped() {
        let w = segment_steps(230, &[20, 120, 220]);
        assert_eq!(w, vec![(0, 70), (70, 170), (170, 229)]);
        for pair in w.windows(2) {
            assert_eq!(pair[0].1, pair[1].0);
        }
        assert_eq!(segment_steps(100, &[40]), vec![(0, 99)]);
    }

    #[test]
    fn ic_single_spike() {
        let mut raw = vec![0.0; 100];
        raw[37] = 2.0;
        let t: Vec<f64> = (0..100).map(|k| k as f64 / 100.0).collect();
        let s = detect_ic(&raw, &t, &[(0, 100)], &[40]);
        assert_eq!(s[0].ic_idx, 37);
        assert_eq!(s[0].ic_peak_g, 2.0);
        assert!(!s[0].degraded);
    }

    #[test]
    fn ic_picks_highest_local_max() {
        let mut raw = vec![0.0; 100];
        raw[30] = 2.0;
        raw[60] = 1.5;
        let t: Vec<f64> = (0..100).map(|k| k as f64 / 100.0).collect();
        let s = detect_ic(&raw, &t, &[(0, 100)], &[45]);
        assert_eq!(s[0].ic_idx, 30);

        raw[60] = 2.0;
        let s = detect_ic(&raw, &t, &[(0, 100)], &[45]);
        assert_eq!(s[0].ic_idx, 30, "ties go to the earliest");
    }

    #[test]
    fn monotone_window_is_degraded() {
        let raw: Vec<f64> = (0..50).map(|k| k as f64).collect();
        let t: Vec<f64> = (0..50).map(|k| k as f64 / 100.0).collect();
        let s = detect_ic(&raw, &t, &[(10, 20)], &[15]);
        assert!(s[0].degraded);
        assert_eq!(s[0].ic_idx, 19);
        assert_eq!(s[0].ic_peak_g, raw[19]);
    }

    #[test]
    fn durations_use_consecutive_ics_and_tail() {
        let t: Vec<f64> = (0..400).map(|k| k as f64 / 100.0).collect();
        let seg = |ic: usize, start: usize, end: usize| StepSegment {
            index: 0,
            start_idx: start,
            end_idx: end,
            filtered_peak_idx: ic,
            to_idx: start,
            ic_idx: ic,
            ic_peak_g: 1.0,
            duration_s: 0.0,
            degraded: false,
        };
        let segs = [seg(100, 80, 125), seg(150, 125, 180), seg(210, 180, 240)];
        let d = step_durations(&segs, &t);
        assert!((d[0] - 0.50).abs() < 1e-12);
        assert!((d[1] - 0.60).abs() < 1e-12);
        assert!((d[2] - 0.30).abs() < 1e-12);

        let single = step_durations(&segs[2..], &t);
        assert_eq!(single.len(), 1);
        assert!((single[0] - 0.30).abs() < 1e-12);
    }

    #[test]
    fn events_alternate() {
        let t: Vec<f64> = (0..400).map(|k| k as f64 / 100.0).collect();
        let raw: Vec<f64> = t.iter().map(|t| (2.0 * PI * 2.0 * t).cos()).collect();
        let peaks = find_peaks_in(&raw, 100.0, &PeakParams::default());
        let windows = segment_steps(raw.len(), &peaks);
        let segs = detect_ic(&raw, &t, &windows, &peaks);
        let events = gait_events(&segs, &t, &raw);
        assert_eq!(events.len(), 2 * segs.len());
        for (i, e) in events.iter().enumerate() {
            let want = if i % 2 == 0 {
                EventKind::ToeOff
            } else {
                EventKind::InitialContact
            };
            assert_eq!(e.kind, want);
            assert_eq!(e.inferred, want == EventKind::ToeOff);
        }
        assert!(events.windows(2).all(|w| w[0].t <= w[1].t));
    }
}
