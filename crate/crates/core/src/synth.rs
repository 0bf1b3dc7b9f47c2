//! Synthetic accelerometer sessions with exactly known ground truth.
//!
//! Each step contributes two parts to the anteroposterior channel: a
//! smooth raised-cosine bump spanning the step and peaking at its initial
//! contact, and a short impact pulse taken from a morphology template. The
//! two parts are scaled so that the raw sample at each IC is the step's
//! peak acceleration. Step length follows a linear law in that peak.
//!
//! Templates are TOML data files (see `templates/`); the two built-in ones
//! are compiled in and can be replaced with [`Template::from_toml`].

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::activity::{Activity, Cohort};
use crate::error::{Error, Result};
use crate::signal_io::{
    read_file, write_accel_csv, write_file, write_manifest, AccelSample, AccelSeries,
    ActivityEntry, GroundTruth, PedometerReading, SessionManifest, DEFAULT_RATE_HZ,
};

/// Upper end of the supported cadence range.
pub const MAX_CADENCE_STEPS_PER_S: f64 = 3.5;
pub const MIN_CADENCE_STEPS_PER_S: f64 = 0.5;
/// Fewer samples per step than this cannot resolve the waveform.
pub const MIN_SAMPLES_PER_STEP: f64 = 10.0;
/// Default quiet time before the first and after the last step.
pub const IDLE_S: f64 = 0.25;

const TD_TEMPLATE: &str = include_str!("../templates/td.toml");
const DMD_TEMPLATE: &str = include_str!("../templates/dmd.toml");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepLengthLaw {
    pub base_m: f64,
    pub slope_m_per_g: f64,
}

impl StepLengthLaw {
    pub fn length(&self, peak_g: f64) -> f64 {
        self.base_m + self.slope_m_per_g * peak_g
    }
}

impl Default for StepLengthLaw {
    fn default() -> Self {
        Self {
            base_m: 0.45,
            slope_m_per_g: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Morphology {
    TdLike,
    DmdLike,
}

impl Morphology {
    pub fn template(self) -> &'static Template {
        static TD: OnceLock<Template> = OnceLock::new();
        static DMD: OnceLock<Template> = OnceLock::new();
        match self {
            Morphology::TdLike => TD.get_or_init(|| {
                Template::from_toml(TD_TEMPLATE).expect("built-in TD template is valid")
            }),
            Morphology::DmdLike => DMD.get_or_init(|| {
                Template::from_toml(DMD_TEMPLATE).expect("built-in DMD template is valid")
            }),
        }
    }

    pub fn for_cohort(cohort: Cohort) -> Self {
        match cohort {
            Cohort::Td => Morphology::TdLike,
            Cohort::Dmd => Morphology::DmdLike,
        }
    }
}

/// One impact lobe: Gaussian rise up to `delay_s`, exponential decay after.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lobe {
    pub delay_s: f64,
    pub amplitude: f64,
    pub rise_s: f64,
    pub decay_s: f64,
}

impl Lobe {
    fn value(&self, dt: f64) -> f64 {
        let x = dt - self.delay_s;
        if x < 0.0 {
            self.amplitude * (-0.5 * (x / self.rise_s).powi(2)).exp()
        } else {
            self.amplitude * (-x / self.decay_s).exp()
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.delay_s - 8.0 * self.rise_s, self.delay_s + 30.0 * self.decay_s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Level {
    pub cadence_steps_per_s: f64,
    pub peak_g: f64,
}

/// Waveform and per-activity speed levels of one morphology.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub name: String,
    pub amplitude_scale: f64,
    pub carrier_fraction: f64,
    pub peak_jitter: f64,
    pub interval_jitter: f64,
    pub lobes: Vec<Lobe>,
    pub levels: BTreeMap<Activity, Level>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateDoc {
    name: String,
    amplitude_scale: f64,
    carrier_fraction: f64,
    peak_jitter: f64,
    interval_jitter: f64,
    #[serde(rename = "lobe")]
    lobes: Vec<Lobe>,
    levels: BTreeMap<String, Level>,
}

impl Template {
    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: TemplateDoc = toml::from_str(text)
            .map_err(|e| Error::Config(format!("template: {}", e.message())))?;
        let mut levels = BTreeMap::new();
        for (label, level) in doc.levels {
            levels.insert(label.parse::<Activity>()?, level);
        }
        let t = Template {
            name: doc.name,
            amplitude_scale: doc.amplitude_scale,
            carrier_fraction: doc.carrier_fraction,
            peak_jitter: doc.peak_jitter,
            interval_jitter: doc.interval_jitter,
            lobes: doc.lobes,
            levels,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&read_file(path.as_ref())?)
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("template {}: {what}", self.name)));
        if !(self.amplitude_scale > 0.0) {
            return bad("amplitude_scale must be positive");
        }
        if !(0.0..1.0).contains(&self.carrier_fraction) {
            return bad("carrier_fraction must be in [0, 1)");
        }
        if !(0.0..0.5).contains(&self.peak_jitter) || !(0.0..0.5).contains(&self.interval_jitter) {
            return bad("jitter must be in [0, 0.5)");
        }
        if self.lobes.is_empty() {
            return bad("at least one lobe is required");
        }
        if self
            .lobes
            .iter()
            .any(|l| !(l.amplitude > 0.0 && l.rise_s > 0.0 && l.decay_s > 0.0 && l.delay_s >= 0.0))
        {
            return bad("lobes need positive amplitude, rise and decay and a non-negative delay");
        }
        // the impact maximum must sit exactly at initial contact
        let at_ic = self.pulse(0.0);
        let (lo, hi) = self.support();
        let mut dt = lo;
        while dt <= hi {
            if dt.abs() > 1e-9 && self.pulse(dt) >= at_ic {
                return bad("pulse maximum is not at delay 0");
            }
            dt += 5e-4;
        }
        Ok(())
    }

    fn pulse(&self, dt: f64) -> f64 {
        self.lobes.iter().map(|l| l.value(dt)).sum()
    }

    fn support(&self) -> (f64, f64) {
        self.lobes.iter().fold((0.0, 0.0), |(lo, hi), l| {
            let (a, b) = l.support();
            (f64::min(lo, a), f64::max(hi, b))
        })
    }

    pub fn level(&self, activity: Activity) -> Result<Level> {
        self.levels
            .get(&activity)
            .copied()
            .ok_or_else(|| Error::Config(format!("template {} has no level for {activity}", self.name)))
    }
}

/// Everything needed to synthesize one activity.
#[derive(Debug, Clone, PartialEq)]
pub struct GaitProfile {
    pub cadence_steps_per_s: f64,
    pub step_length_law: StepLengthLaw,
    /// Nominal per-step peak before jitter, in g.
    pub peak_accel_g: f64,
    pub morphology: Morphology,
    /// `f64::INFINITY` disables noise.
    pub noise_snr_db: f64,
    pub rate_hz: f64,
    pub seed: u64,
    /// Quiet time before the first and after the last step.
    pub idle_s: f64,
}

impl GaitProfile {
    /// The template's level for `activity`, scaled by its amplitude factor.
    pub fn for_activity(morphology: Morphology, activity: Activity, seed: u64) -> Result<Self> {
        let template = morphology.template();
        let level = template.level(activity)?;
        Ok(Self {
            cadence_steps_per_s: level.cadence_steps_per_s,
            step_length_law: StepLengthLaw::default(),
            peak_accel_g: level.peak_g * template.amplitude_scale,
            morphology,
            noise_snr_db: f64::INFINITY,
            rate_hz: DEFAULT_RATE_HZ,
            seed,
            idle_s: IDLE_S,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.cadence_steps_per_s;
        if !(MIN_CADENCE_STEPS_PER_S..=MAX_CADENCE_STEPS_PER_S).contains(&c) {
            return Err(Error::Config(format!(
                "cadence {c} steps/s outside the supported range {MIN_CADENCE_STEPS_PER_S}-{MAX_CADENCE_STEPS_PER_S}"
            )));
        }
        if !(self.rate_hz.is_finite() && self.rate_hz > 0.0) {
            return Err(Error::Config("sampling rate must be positive".into()));
        }
        if self.rate_hz / c < MIN_SAMPLES_PER_STEP {
            return Err(Error::Config(format!(
                "{} Hz gives fewer than {MIN_SAMPLES_PER_STEP} samples per step at {c} steps/s",
                self.rate_hz
            )));
        }
        if !(self.peak_accel_g.is_finite() && self.peak_accel_g > 0.0) {
            return Err(Error::Config("peak acceleration must be positive".into()));
        }
        if !(self.idle_s.is_finite() && self.idle_s >= 0.0) {
            return Err(Error::Config("idle time must be non-negative".into()));
        }
        if self.noise_snr_db.is_nan() {
            return Err(Error::Config("SNR must be a number or infinite".into()));
        }
        let law = self.step_length_law;
        if !(law.base_m.is_finite() && law.slope_m_per_g.is_finite()) {
            return Err(Error::Config("step length law must be finite".into()));
        }
        Ok(())
    }
}

/// How long an activity lasts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    /// Walking time; the step count is `round(duration · cadence)`.
    Duration(f64),
    /// Steps are emitted until their lengths reach the target.
    Distance(f64),
}

impl Extent {
    /// The protocol's extent for each activity.
    pub fn standard(activity: Activity) -> Self {
        match activity {
            Activity::SixMwt => Extent::Duration(360.0),
            Activity::FreeWalk => Extent::Duration(120.0),
            Activity::HundredMrw => Extent::Distance(100.0),
            _ => Extent::Distance(25.0),
        }
    }
}

/// Exactly what was injected into one synthetic activity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthTruth {
    pub activity: Activity,
    pub step_count: usize,
    pub total_distance_m: f64,
    /// Walking time from the first to the last step boundary.
    pub active_duration_s: f64,
    pub ic_times_s: Vec<f64>,
    pub ic_indices: Vec<usize>,
    pub step_lengths_m: Vec<f64>,
    /// Noise-free anteroposterior value at each IC.
    pub peaks_g: Vec<f64>,
}

/// Synthesizes one activity with a built-in template.
pub fn generate_activity(
    profile: &GaitProfile,
    activity: Activity,
    extent: Extent,
) -> Result<(AccelSeries, SynthTruth)> {
    generate_with_template(profile, profile.morphology.template(), activity, extent)
}

pub fn generate_with_template(
    profile: &GaitProfile,
    template: &Template,
    activity: Activity,
    extent: Extent,
) -> Result<(AccelSeries, SynthTruth)> {
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let rate = profile.rate_hz;
    let period = 1.0 / profile.cadence_steps_per_s;
    let jitter = |rng: &mut ChaCha8Rng, j: f64| if j > 0.0 { 1.0 + rng.gen_range(-j..=j) } else { 1.0 };

    // step boundaries, nominal peaks and lengths
    let mut intervals = Vec::new();
    let mut nominal_peaks = Vec::new();
    match extent {
        Extent::Duration(d) => {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::Config("duration must be positive".into()));
            }
            let n = (d * profile.cadence_steps_per_s).round() as usize;
            for _ in 0..n {
                intervals.push(period * jitter(&mut rng, template.interval_jitter));
                nominal_peaks.push(profile.peak_accel_g * jitter(&mut rng, template.peak_jitter));
            }
        }
        Extent::Distance(target) => {
            if !(target.is_finite() && target > 0.0) {
                return Err(Error::Config("target distance must be positive".into()));
            }
            let mut covered = 0.0;
            while covered < target {
                let step_len = profile.step_length_law.length(profile.peak_accel_g);
                if step_len <= 0.0 {
                    return Err(Error::Config("step length law gives non-positive lengths".into()));
                }
                intervals.push(period * jitter(&mut rng, template.interval_jitter));
                let peak = profile.peak_accel_g * jitter(&mut rng, template.peak_jitter);
                nominal_peaks.push(peak);
                covered += profile.step_length_law.length(peak).max(1e-3);
            }
        }
    }
    if intervals.is_empty() {
        return Err(Error::Config("extent too short for a single step".into()));
    }

    let mut bounds = vec![profile.idle_s];
    for d in &intervals {
        bounds.push(bounds[bounds.len() - 1] + d);
    }
    let n_samples = ((bounds[bounds.len() - 1] + profile.idle_s) * rate).ceil() as usize + 1;
    let ic_indices: Vec<usize> = (0..intervals.len())
        .map(|k| ((bounds[k] + 0.5 * intervals[k]) * rate).round() as usize)
        .collect();

    let mut ap = vec![0.0; n_samples];
    let at_ic = template.pulse(0.0);
    let (lo, hi) = template.support();
    for (k, &ic) in ic_indices.iter().enumerate() {
        let a = nominal_peaks[k];
        let carrier = template.carrier_fraction * a;
        let pulse = (1.0 - template.carrier_fraction) * a / at_ic;
        let t_ic = ic as f64 / rate;
        let (left, right) = (t_ic - bounds[k], bounds[k + 1] - t_ic);
        let first = ((bounds[k] * rate).floor() as usize).max(1);
        let last = ((bounds[k + 1] * rate).ceil() as usize).min(n_samples - 1);
        for (i, slot) in ap.iter_mut().enumerate().take(last + 1).skip(first) {
            let dt = i as f64 / rate - t_ic;
            let h = if dt < 0.0 { left } else { right };
            if dt.abs() < h {
                *slot += carrier * 0.5 * (1.0 + (std::f64::consts::PI * dt / h).cos());
            }
        }
        let p_first = ((t_ic + lo) * rate).floor().max(0.0) as usize;
        let p_last = (((t_ic + hi) * rate).ceil() as usize).min(n_samples - 1);
        for (i, slot) in ap.iter_mut().enumerate().take(p_last + 1).skip(p_first) {
            *slot += pulse * template.pulse(i as f64 / rate - t_ic);
        }
    }

    let peaks_g: Vec<f64> = ic_indices.iter().map(|&i| ap[i]).collect();
    let step_lengths_m: Vec<f64> = peaks_g
        .iter()
        .map(|&p| profile.step_length_law.length(p))
        .collect();
    let truth = SynthTruth {
        activity,
        step_count: ic_indices.len(),
        total_distance_m: step_lengths_m.iter().sum(),
        active_duration_s: bounds[bounds.len() - 1] - bounds[0],
        ic_times_s: ic_indices.iter().map(|&i| i as f64 / rate).collect(),
        ic_indices,
        step_lengths_m,
        peaks_g,
    };

    let sigma = noise_sigma(&ap, profile.noise_snr_db, &bounds, rate);
    let noise = match sigma {
        Some(s) => Some(Normal::new(0.0, s).map_err(|e| Error::Config(e.to_string()))?),
        None => None,
    };
    let draw = |rng: &mut ChaCha8Rng| noise.map_or(0.0, |n| n.sample(rng));
    let samples = ap
        .iter()
        .enumerate()
        .map(|(i, &z)| AccelSample {
            t: i as f64 / rate,
            ax: draw(&mut rng),
            ay: 1.0 + draw(&mut rng),
            az: z + draw(&mut rng),
        })
        .collect();
    Ok((AccelSeries::new(samples, rate)?, truth))
}

/// Noise SD for a target SNR, with signal power measured over the walking
/// span only.
fn noise_sigma(ap: &[f64], snr_db: f64, bounds: &[f64], rate: f64) -> Option<f64> {
    if snr_db.is_infinite() && snr_db > 0.0 {
        return None;
    }
    let a = (bounds[0] * rate) as usize;
    let b = ((bounds[bounds.len() - 1] * rate) as usize).min(ap.len());
    let power = ap[a..b].iter().map(|v| v * v).sum::<f64>() / (b - a).max(1) as f64;
    Some((power / 10f64.powf(snr_db / 10.0)).sqrt())
}

/// Cohort generation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortSpec {
    pub n_td: usize,
    pub n_dmd: usize,
    pub seed: u64,
    pub snr_db: f64,
    pub rate_hz: f64,
    pub step_length_law: StepLengthLaw,
    pub idle_s: f64,
    /// Per-subject amplitude (±10 %) and cadence (±5 %) variation.
    pub randomize_subjects: bool,
    /// Perturb the manifest's observed values instead of recording the
    /// injected ones exactly.
    pub observation_noise: bool,
}

impl Default for CohortSpec {
    fn default() -> Self {
        Self {
            n_td: 3,
            n_dmd: 3,
            seed: 1,
            snr_db: f64::INFINITY,
            rate_hz: DEFAULT_RATE_HZ,
            step_length_law: StepLengthLaw::default(),
            idle_s: IDLE_S,
            randomize_subjects: true,
            observation_noise: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthActivity {
    pub series: AccelSeries,
    pub truth: SynthTruth,
    /// What the manifest records as observed.
    pub observed: GroundTruth,
    pub pedometer: PedometerReading,
}

#[derive(Debug, Clone)]
pub struct SubjectSession {
    pub subject_id: String,
    pub cohort: Cohort,
    pub activities: Vec<SynthActivity>,
}

impl SubjectSession {
    pub fn activity(&self, activity: Activity) -> Option<&SynthActivity> {
        self.activities.iter().find(|a| a.truth.activity == activity)
    }
}

fn mix(seed: u64, salt: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates every subject in memory; all eight activities each.
pub fn generate_cohort(spec: &CohortSpec) -> Result<Vec<SubjectSession>> {
    let subjects = (0..spec.n_td)
        .map(|i| (Cohort::Td, i))
        .chain((0..spec.n_dmd).map(|i| (Cohort::Dmd, i)));
    subjects
        .enumerate()
        .map(|(s, (cohort, i))| {
            let subject_seed = mix(spec.seed, s as u64 + 1);
            generate_subject(spec, cohort, format!("{}{:02}", cohort.label(), i + 1), subject_seed)
        })
        .collect()
}

fn generate_subject(
    spec: &CohortSpec,
    cohort: Cohort,
    subject_id: String,
    seed: u64,
) -> Result<SubjectSession> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (amp, cad) = if spec.randomize_subjects {
        (rng.gen_range(0.9..=1.1), rng.gen_range(0.95..=1.05))
    } else {
        (1.0, 1.0)
    };
    let morphology = Morphology::for_cohort(cohort);
    let mut activities = Vec::with_capacity(Activity::ALL.len());
    for (k, &activity) in Activity::ALL.iter().enumerate() {
        let mut profile = GaitProfile::for_activity(morphology, activity, mix(seed, 100 + k as u64))?;
        profile.peak_accel_g *= amp;
        profile.cadence_steps_per_s = (profile.cadence_steps_per_s * cad).min(MAX_CADENCE_STEPS_PER_S);
        profile.noise_snr_db = spec.snr_db;
        profile.rate_hz = spec.rate_hz;
        profile.step_length_law = spec.step_length_law;
        profile.idle_s = spec.idle_s;
        let (series, truth) = generate_activity(&profile, activity, Extent::standard(activity))?;

        let mut observed = GroundTruth {
            observed_distance_m: Some(truth.total_distance_m),
            observed_steps: Some(truth.step_count as u64),
            observed_duration_s: Some(truth.active_duration_s),
        };
        if spec.observation_noise {
            let d = truth.total_distance_m * (1.0 + 0.02 * rng.gen_range(-1.0..=1.0));
            let n = truth.step_count as f64 * (1.0 + 0.01 * rng.gen_range(-1.0..=1.0));
            observed.observed_distance_m = Some(d);
            observed.observed_steps = Some(n.round().max(0.0) as u64);
        }
        // a phone pedometer that undercounts and uses a fixed stride guess
        let ped_steps = (truth.step_count as f64 * rng.gen_range(0.55..=0.95)).round() as u64;
        let pedometer = PedometerReading {
            steps: Some(ped_steps),
            distance_m: Some(ped_steps as f64 * rng.gen_range(0.5..=0.8)),
        };
        activities.push(SynthActivity {
            series,
            truth,
            observed,
            pedometer,
        });
    }
    Ok(SubjectSession {
        subject_id,
        cohort,
        activities,
    })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TruthDoc {
    subject_id: String,
    cohort: Cohort,
    #[serde(rename = "activity")]
    activities: Vec<SynthTruth>,
}

/// Writes `<out_dir>/<subject>/{manifest.toml,truth.toml,<activity>.csv}`
/// for every session and returns the manifest paths. Refuses to write into
/// a non-empty directory unless `force` is set.
pub fn write_cohort(sessions: &[SubjectSession], out_dir: impl AsRef<Path>, force: bool) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    if !force {
        if let Ok(mut entries) = fs::read_dir(out_dir) {
            if entries.next().is_some() {
                return Err(Error::Collision(out_dir.to_path_buf()));
            }
        }
    }
    let mut manifests = Vec::with_capacity(sessions.len());
    for session in sessions {
        let dir = out_dir.join(&session.subject_id);
        let mut entries = Vec::new();
        for a in &session.activities {
            let file = format!("{}.csv", a.truth.activity.label());
            write_accel_csv(&a.series, dir.join(&file))?;
            entries.push(ActivityEntry {
                activity: a.truth.activity,
                trace: PathBuf::from(file),
                truth: a.observed,
                pedometer: a.pedometer,
            });
        }
        let rate = session
            .activities
            .first()
            .map_or(DEFAULT_RATE_HZ, |a| a.series.nominal_rate_hz());
        let manifest = SessionManifest {
            subject_id: session.subject_id.clone(),
            cohort: Some(session.cohort),
            nominal_rate_hz: rate,
            entries,
        };
        let path = dir.join("manifest.toml");
        write_manifest(&manifest, &path)?;
        write_truth(session, dir.join("truth.toml"))?;
        manifests.push(path);
    }
    Ok(manifests)
}

pub fn write_truth(session: &SubjectSession, path: impl AsRef<Path>) -> Result<()> {
    let doc = TruthDoc {
        subject_id: session.subject_id.clone(),
        cohort: session.cohort,
        activities: session.activities.iter().map(|a| a.truth.clone()).collect(),
    };
    let text = toml::to_string(&doc).map_err(|e| Error::Config(e.to_string()))?;
    write_file(path.as_ref(), &text)
}

/// Reads a truth sidecar: subject id, cohort and per-activity truth.
pub fn read_truth(path: impl AsRef<Path>) -> Result<(String, Cohort, Vec<SynthTruth>)> {
    let path = path.as_ref();
    let doc: TruthDoc = toml::from_str(&read_file(path)?)
        .map_err(|e| Error::format(path, e.message().to_string()))?;
    Ok((doc.subject_id, doc.cohort, doc.activities))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(cadence: f64) -> GaitProfile {
        GaitProfile {
            cadence_steps_per_s: cadence,
            step_length_law: StepLengthLaw::default(),
            peak_accel_g: 1.0,
            morphology: Morphology::TdLike,
            noise_snr_db: f64::INFINITY,
            rate_hz: 100.0,
            seed: 7,
            idle_s: IDLE_S,
        }
    }

    #[test]
    fn builtin_templates_load() {
        for m in [Morphology::TdLike, Morphology::DmdLike] {
            let t = m.template();
            assert_eq!(t.levels.len(), 8);
            assert!((t.pulse(0.0) - t.lobes[0].amplitude).abs() < 1e-6);
        }
        assert_eq!(Morphology::DmdLike.template().lobes.len(), 2);
    }

    #[test]
    fn template_with_late_maximum_is_rejected() {
        let text = TD_TEMPLATE.replace("amplitude = 1.0", "amplitude = 1.0\n\n[[lobe]]\ndelay_s = 0.1\namplitude = 2.0\nrise_s = 0.01\ndecay_s = 0.02");
        assert!(matches!(Template::from_toml(&text), Err(Error::Config(_))));
    }

    #[test]
    fn ten_seconds_at_two_steps_per_second() {
        let (series, truth) = generate_activity(&profile(2.0), Activity::FreeWalk, Extent::Duration(10.0)).unwrap();
        assert_eq!(truth.step_count, 20);
        assert_eq!(truth.ic_indices.len(), 20);
        let ap = series.anteroposterior();
        for (&i, &p) in truth.ic_indices.iter().zip(&truth.peaks_g) {
            assert_eq!(ap[i], p);
            assert!(ap[i] > ap[i - 1] && ap[i] > ap[i + 1]);
            assert!((p - 1.0).abs() <= 0.05 + 1e-9);
        }
        let sum: f64 = truth.step_lengths_m.iter().sum();
        assert_eq!(truth.total_distance_m, sum);
        assert!((truth.active_duration_s - 10.0).abs() < 0.5);
    }

    #[test]
    fn distance_extent_reaches_target() {
        let (_, truth) = generate_activity(&profile(1.8), Activity::ScL2, Extent::Distance(25.0)).unwrap();
        assert!(truth.total_distance_m >= 25.0);
        assert!(truth.total_distance_m - truth.step_lengths_m.last().unwrap() < 25.0);
    }

    #[test]
    fn same_seed_same_series() {
        let mut p = profile(2.3);
        p.noise_snr_db = 20.0;
        let a = generate_activity(&p, Activity::ScL4, Extent::Duration(5.0)).unwrap();
        let b = generate_activity(&p, Activity::ScL4, Extent::Duration(5.0)).unwrap();
        assert_eq!(a, b);
        p.seed += 1;
        assert_ne!(generate_activity(&p, Activity::ScL4, Extent::Duration(5.0)).unwrap().0, a.0);
    }

    #[test]
    fn infeasible_profiles_rejected() {
        assert!(generate_activity(&profile(4.0), Activity::ScL5, Extent::Duration(5.0)).is_err());
        let mut p = profile(2.0);
        p.rate_hz = 15.0;
        assert!(matches!(p.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn noise_level_matches_snr() {
        let mut p = profile(2.0);
        p.noise_snr_db = 20.0;
        let (noisy, truth) = generate_activity(&p, Activity::FreeWalk, Extent::Duration(60.0)).unwrap();
        p.noise_snr_db = f64::INFINITY;
        let (clean, _) = generate_activity(&p, Activity::FreeWalk, Extent::Duration(60.0)).unwrap();
        let (c, n) = (clean.anteroposterior(), noisy.anteroposterior());
        let a = truth.ic_indices[0];
        let b = *truth.ic_indices.last().unwrap();
        let ps = c[a..b].iter().map(|v| v * v).sum::<f64>();
        let pn = c[a..b].iter().zip(&n[a..b]).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
        let snr = 10.0 * (ps / pn).log10();
        assert!((snr - 20.0).abs() < 0.5, "{snr}");
    }

    #[test]
    fn cohort_layout_and_collision() {
        let spec = CohortSpec {
            n_td: 1,
            n_dmd: 1,
            ..CohortSpec::default()
        };
        let sessions = generate_cohort(&spec).unwrap();
        assert_eq!(sessions.len(), 2);
        assert_eq!(sessions[1].subject_id, "DMD01");
        let dir = tempfile::tempdir().unwrap();
        let manifests = write_cohort(&sessions, dir.path(), false).unwrap();
        assert_eq!(manifests.len(), 2);
        let traces = manifests
            .iter()
            .map(|m| crate::signal_io::parse_manifest(m).unwrap().entries.len())
            .sum::<usize>();
        assert_eq!(traces, 16);
        assert!(matches!(write_cohort(&sessions, dir.path(), false), Err(Error::Collision(_))));
        write_cohort(&sessions, dir.path(), true).unwrap();
        let (id, cohort, truth) = read_truth(dir.path().join("TD01/truth.toml")).unwrap();
        assert_eq!((id.as_str(), cohort), ("TD01", Cohort::Td));
        assert_eq!(truth, sessions[0].activities.iter().map(|a| a.truth.clone()).collect::<Vec<_>>());
    }
}
