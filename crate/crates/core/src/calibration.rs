//! Per-subject step-length calibration.
//!
//! Each speed-calibration activity contributes one point: the mean IC peak
//! acceleration of its steps against the observed distance divided by the
//! detected step count. A least-squares polynomial through those points
//! maps any later step's IC peak to a step length.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::activity::Activity;
use crate::error::{Error, Result};
use crate::signal_io::{read_file, write_file};
use crate::step_detect::StepSegment;

/// Peaks further than this many half-widths from the centre of the fitted
/// range are flagged as extrapolated.
pub const EXTRAPOLATION_ENVELOPE: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelForm {
    #[default]
    Linear,
    Quadratic,
}

impl ModelForm {
    pub fn n_coefficients(self) -> usize {
        match self {
            ModelForm::Linear => 2,
            ModelForm::Quadratic => 3,
        }
    }
}

impl std::str::FromStr for ModelForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(ModelForm::Linear),
            "quadratic" => Ok(ModelForm::Quadratic),
            other => Err(Error::Config(format!("unknown model form `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub activity: Activity,
    pub mean_peak_g: f64,
    pub mean_step_length_m: f64,
}

/// Detected steps of one calibration activity with its observed distance.
#[derive(Debug, Clone, Copy)]
pub struct CalibrationInput<'a> {
    pub activity: Activity,
    pub observed_distance_m: f64,
    pub segments: &'a [StepSegment],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationModel {
    pub subject_id: String,
    pub form: ModelForm,
    /// Polynomial coefficients, intercept first.
    pub coefficients: Vec<f64>,
    pub residual_rms_m: f64,
    pub domain_g: (f64, f64),
    #[serde(rename = "fit_point")]
    pub fit_points: Vec<CalibrationPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLengthPrediction {
    pub length_m: f64,
    /// Peak lies outside the extrapolation envelope of the fitted range.
    pub extrapolated: bool,
    /// The polynomial went negative and was clamped to zero.
    pub clamped: bool,
}

impl StepLengthPrediction {
    pub fn flagged(&self) -> bool {
        self.extrapolated || self.clamped
    }
}

pub fn build_points(inputs: &[CalibrationInput<'_>]) -> Result<Vec<CalibrationPoint>> {
    let mut points: Vec<CalibrationPoint> = Vec::with_capacity(inputs.len());
    for input in inputs {
        let activity = input.activity;
        if !activity.is_calibration() {
            return Err(Error::Config(format!("{activity} is not a calibration activity")));
        }
        if points.iter().any(|p| p.activity == activity) {
            return Err(Error::Config(format!("{activity} supplied twice")));
        }
        let steps = input.segments.len();
        if steps < 3 {
            return Err(Error::InsufficientSteps { activity, steps });
        }
        if !(input.observed_distance_m.is_finite() && input.observed_distance_m > 0.0) {
            return Err(Error::Incomplete {
                activity,
                field: "a positive observed_distance_m",
            });
        }
        let mean_peak_g =
            input.segments.iter().map(|s| s.ic_peak_g).sum::<f64>() / steps as f64;
        if mean_peak_g <= 0.0 {
            return Err(Error::Degenerate(format!(
                "{activity}: mean IC peak {mean_peak_g} g is not positive"
            )));
        }
        points.push(CalibrationPoint {
            activity,
            mean_peak_g,
            mean_step_length_m: input.observed_distance_m / steps as f64,
        });
    }
    Ok(points)
}

/// Ordinary least squares of step length on mean peak acceleration.
pub fn fit(subject_id: &str, points: &[CalibrationPoint], form: ModelForm) -> Result<CalibrationModel> {
    let k = form.n_coefficients();
    if points.len() < k {
        return Err(Error::Underdetermined {
            points: points.len(),
            coefficients: k,
        });
    }
    let x: Vec<f64> = points.iter().map(|p| p.mean_peak_g).collect();
    let y: Vec<f64> = points.iter().map(|p| p.mean_step_length_m).collect();
    let mut distinct = x.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::DegenerateDesign("all mean peak values are identical".into()));
    }
    if distinct.len() < k {
        return Err(Error::DegenerateDesign(format!(
            "{} distinct peak values cannot support a {k}-term fit",
            distinct.len()
        )));
    }

    let coefficients = match form {
        ModelForm::Linear => fit_line(&x, &y),
        ModelForm::Quadratic => {
            let design: Vec<Vec<f64>> = (0..k)
                .map(|p| x.iter().map(|xi| xi.powi(p as i32)).collect())
                .collect();
            householder_lstsq(design, y.clone())?
        }
    };

    let sse: f64 = x
        .iter()
        .zip(&y)
        .map(|(&xi, &yi)| (polyval(&coefficients, xi) - yi).powi(2))
        .sum();
    Ok(CalibrationModel {
        subject_id: subject_id.to_string(),
        form,
        coefficients,
        residual_rms_m: (sse / points.len() as f64).sqrt(),
        domain_g: (distinct[0], distinct[distinct.len() - 1]),
        fit_points: points.to_vec(),
    })
}

fn fit_line(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - xm) * (xi - xm);
        sxy += (xi - xm) * (yi - ym);
    }
    let slope = sxy / sxx;
    vec![ym - slope * xm, slope]
}

/// Least squares through Householder QR. `columns` is the design matrix
/// stored column by column.
fn householder_lstsq(mut columns: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
    let m = rhs.len();
    let k = columns.len();
    for j in 0..k {
        let norm = columns[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateDesign("rank-deficient design".into()));
        }
        let alpha = if columns[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = columns[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|a| a * a).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let reflect = |target: &mut [f64]| {
            let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
            let s = 2.0 * dot / vnorm2;
            for (t, a) in target.iter_mut().zip(&v) {
                *t -= s * a;
            }
        };
        for col in columns.iter_mut().skip(j) {
            reflect(&mut col[j..m]);
        }
        reflect(&mut rhs[j..m]);
    }
    let mut beta = vec![0.0; k];
    for i in (0..k).rev() {
        let r_ii = columns[i][i];
        if r_ii.abs() < 1e-12 * columns[0][0].abs().max(1.0) {
            return Err(Error::DegenerateDesign("rank-deficient design".into()));
        }
        let tail: f64 = (i + 1..k).map(|j| columns[j][i] * beta[j]).sum();
        beta[i] = (rhs[i] - tail) / r_ii;
    }
    Ok(beta)
}

pub(crate) fn polyval(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

impl CalibrationModel {
    /// Raw polynomial value, without clamping.
    pub fn evaluate(&self, peak_g: f64) -> f64 {
        polyval(&self.coefficients, peak_g)
    }

    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn slope(&self) -> f64 {
        self.coefficients[1]
    }

    pub fn is_extrapolated(&self, peak_g: f64) -> bool {
        let (lo, hi) = self.domain_g;
        let centre = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo) * EXTRAPOLATION_ENVELOPE;
        peak_g < centre - half || peak_g > centre + half
    }

    pub fn predict(&self, peak_g: f64) -> StepLengthPrediction {
        let raw = self.evaluate(peak_g);
        StepLengthPrediction {
            length_m: raw.max(0.0),
            extrapolated: self.is_extrapolated(peak_g),
            clamped: raw < 0.0,
        }
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.fit_points
            .iter()
            .map(|p| p.mean_step_length_m - self.evaluate(p.mean_peak_g))
            .collect()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model serializes")
    }

    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        let model: CalibrationModel =
            toml::from_str(text).map_err(|e| Error::format(origin, e.message().to_string()))?;
        if model.coefficients.len() != model.form.n_coefficients() {
            return Err(Error::format(
                origin,
                format!(
                    "{:?} model needs {} coefficients, found {}",
                    model.form,
                    model.form.n_coefficients(),
                    model.coefficients.len()
                ),
            ));
        }
        Ok(model)
    }
}

pub fn predict_step_length(model: &CalibrationModel, peak_g: f64) -> StepLengthPrediction {
    model.predict(peak_g)
}

pub fn write_model(model: &CalibrationModel, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &model.to_toml())
}

pub fn read_model(path: impl AsRef<Path>) -> Result<CalibrationModel> {
    let path = path.as_ref();
    CalibrationModel::from_toml(&read_file(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts(xy: &[(f64, f64)]) -> Vec<CalibrationPoint> {
        xy.iter()
            .enumerate()
            .map(|(i, &(x, y))| CalibrationPoint {
                activity: Activity::CALIBRATION[i % 5],
                mean_peak_g: x,
                mean_step_length_m: y,
            })
            .collect()
    }

    fn segments_with_peaks(peaks: &[f64]) -> Vec<StepSegment> {
        peaks
            .iter()
            .enumerate()
            .map(|(i, &p)| StepSegment {
                index: i,
                start_idx: i * 50,
                end_idx: (i + 1) * 50,
                filtered_peak_idx: i * 50 + 25,
                to_idx: i * 50,
                ic_idx: i * 50 + 25,
                ic_peak_g: p,
                duration_s: 0.5,
                degraded: false,
            })
            .collect()
    }

    /// Normal equations XᵀX β = Xᵀy solved by Gaussian elimination with
    /// partial pivoting.
    fn normal_equations(x: &[f64], y: &[f64], k: usize) -> Vec<f64> {
        let mut a = vec![vec![0.0; k + 1]; k];
        for (&xi, &yi) in x.iter().zip(y) {
            for r in 0..k {
                for c in 0..k {
                    a[r][c] += xi.powi((r + c) as i32);
                }
                a[r][k] += xi.powi(r as i32) * yi;
            }
        }
        for col in 0..k {
            let piv = (col..k)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, piv);
            for r in 0..k {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for c in col..=k {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
        (0..k).map(|r| a[r][k] / a[r][r]).collect()
    }

    #[test]
    fn points_from_segments() {
        let segs = segments_with_peaks(&[0.8; 25]);
        let pts = build_points(&[CalibrationInput {
            activity: Activity::ScL2,
            observed_distance_m: 25.0,
            segments: &segs,
        }])
        .unwrap();
        assert_eq!(pts[0].mean_step_length_m, 1.0);
        assert!((pts[0].mean_peak_g - 0.8).abs() < 1e-15);
    }

    #[test]
    fn too_few_steps_names_activity() {
        let segs = segments_with_peaks(&[1.0, 1.1]);
        let err = build_points(&[CalibrationInput {
            activity: Activity::ScL4,
            observed_distance_m: 3.0,
            segments: &segs,
        }])
        .unwrap_err();
        assert!(matches!(err, Error::InsufficientSteps { activity: Activity::ScL4, steps: 2 }));
        assert!(err.to_string().contains("SC-L4"));
    }

    #[test]
    fn non_calibration_activity_rejected() {
        let segs = segments_with_peaks(&[1.0; 5]);
        assert!(build_points(&[CalibrationInput {
            activity: Activity::FreeWalk,
            observed_distance_m: 3.0,
            segments: &segs,
        }])
        .is_err());
    }

    #[test]
    fn exact_line() {
        let xs = [0.4, 0.6, 0.8, 1.0, 1.2];
        let p = pts(&xs.map(|x| (x, 0.2 + 0.5 * x)));
        let m = fit("S", &p, ModelForm::Linear).unwrap();
        assert!((m.intercept() - 0.2).abs() < 1e-9);
        assert!((m.slope() - 0.5).abs() < 1e-9);
        assert!(m.residual_rms_m < 1e-12);
        assert_eq!(m.domain_g, (0.4, 1.2));
    }

    #[test]
    fn two_points_interpolate() {
        let m = fit("S", &pts(&[(0.5, 0.7), (1.5, 1.3)]), ModelForm::Linear).unwrap();
        assert!((m.evaluate(0.5) - 0.7).abs() < 1e-12);
        assert!((m.evaluate(1.5) - 1.3).abs() < 1e-12);
    }

    #[test]
    fn degenerate_designs() {
        assert!(matches!(
            fit("S", &pts(&[(1.0, 0.7), (1.0, 0.8), (1.0, 0.9)]), ModelForm::Linear),
            Err(Error::DegenerateDesign(_))
        ));
        assert!(matches!(
            fit("S", &pts(&[(1.0, 0.7)]), ModelForm::Linear),
            Err(Error::Underdetermined { points: 1, coefficients: 2 })
        ));
        assert!(matches!(
            fit("S", &pts(&[(1.0, 0.7), (2.0, 0.8)]), ModelForm::Quadratic),
            Err(Error::Underdetermined { .. })
        ));
        assert!(matches!(
            fit("S", &pts(&[(1.0, 0.7), (2.0, 0.8), (2.0, 0.9)]), ModelForm::Quadratic),
            Err(Error::DegenerateDesign(_))
        ));
    }

    #[test]
    fn quadratic_recovers_parabola() {
        let xs = [0.5, 0.8, 1.1, 1.4, 1.9];
        let p = pts(&xs.map(|x| (x, 0.3 + 0.4 * x - 0.05 * x * x)));
        let m = fit("S", &p, ModelForm::Quadratic).unwrap();
        for (got, want) in m.coefficients.iter().zip([0.3, 0.4, -0.05]) {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn prediction_and_clamp() {
        let xs = [0.4, 0.6, 0.8, 1.0, 1.2];
        let m = fit("S", &pts(&xs.map(|x| (x, 0.2 + 0.5 * x))), ModelForm::Linear).unwrap();
        let p = predict_step_length(&m, 1.0);
        assert!((p.length_m - 0.7).abs() < 1e-12);
        assert!(!p.flagged());

        let m = fit("S", &pts(&[(0.8, 0.3), (1.2, 0.7)]), ModelForm::Linear).unwrap();
        let p = m.predict(0.1);
        assert_eq!(p.length_m, 0.0);
        assert!(p.clamped && p.extrapolated);
        // envelope is 1.5× the half-width around the centre: [0.7, 1.3]
        assert!(!m.predict(0.71).extrapolated);
        assert!(m.predict(1.31).extrapolated);
    }

    #[test]
    fn model_file_round_trip() {
        let xs = [0.4, 0.6, 0.8, 1.0, 1.2];
        let m = fit("S01", &pts(&xs.map(|x| (x, 0.21 + 0.5 * x * x))), ModelForm::Quadratic).unwrap();
        let text = m.to_toml();
        assert!(text.contains("form = \"quadratic\""));
        let back = CalibrationModel::from_toml(&text, Path::new("m.toml")).unwrap();
        assert_eq!(back, m);
    }

    proptest! {
        #[test]
        fn matches_normal_equations(
            xs in proptest::collection::vec(0.3f64..2.0, 5),
            ys in proptest::collection::vec(0.3f64..1.5, 5),
        ) {
            let spread = xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min);
            prop_assume!(spread > 0.1);
            let p = pts(&xs.iter().cloned().zip(ys.iter().cloned()).collect::<Vec<_>>());
            let m = fit("S", &p, ModelForm::Linear).unwrap();
            for (a, b) in m.coefficients.iter().zip(normal_equations(&xs, &ys, 2)) {
                prop_assert!((a - b).abs() < 1e-9);
            }
            let m = fit("S", &p, ModelForm::Quadratic).unwrap();
            for (a, b) in m.coefficients.iter().zip(normal_equations(&xs, &ys, 3)) {
                prop_assert!((a - b).abs() < 1e-6 * b.abs().max(1.0));
            }
        }

        #[test]
        fn residuals_sum_to_zero_and_shift_moves_intercept(
            xs in proptest::collection::vec(0.3f64..2.0, 5),
            ys in proptest::collection::vec(0.3f64..1.5, 5),
            c in -1.0f64..1.0,
        ) {
            let spread = xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min);
            prop_assume!(spread > 0.1);
            let p = pts(&xs.iter().cloned().zip(ys.iter().cloned()).collect::<Vec<_>>());
            let m = fit("S", &p, ModelForm::Linear).unwrap();
            prop_assert!(m.residuals().iter().sum::<f64>().abs() < 1e-9);

            let shifted: Vec<_> = p.iter().map(|q| CalibrationPoint { mean_step_length_m: q.mean_step_length_m + c, ..*q }).collect();
            let ms = fit("S", &shifted, ModelForm::Linear).unwrap();
            prop_assert!((ms.intercept() - m.intercept() - c).abs() < 1e-9);
            prop_assert!((ms.slope() - m.slope()).abs() < 1e-9);

            if m.slope() >= 0.0 {
                let (lo, hi) = m.domain_g;
                let grid: Vec<f64> = (0..=20).map(|i| m.predict(lo + (hi - lo) * i as f64 / 20.0).length_m).collect();
                prop_assert!(grid.windows(2).all(|w| w[1] >= w[0]));
            }
        }
    }
}
