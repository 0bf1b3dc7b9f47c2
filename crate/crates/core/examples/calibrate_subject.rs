// Per-subject step-length regression from the five speed-calibration
// walks, in linear and quadratic form.

use gaitcf::calibration::ModelForm;
use gaitcf::pipeline::{calibrate_records, DetectionConfig};
use gaitcf::signal_io::ActivityRecord;
use gaitcf::synth::{generate_cohort, CohortSpec};

fn main() {
    let session = generate_cohort(&CohortSpec {
        n_td: 1,
        n_dmd: 0,
        seed: 5,
        snr_db: 25.0,
        ..CohortSpec::default()
    })
    .unwrap()
    .remove(0);

    let records: Vec<ActivityRecord> = session
        .activities
        .iter()
        .filter(|a| a.truth.activity.is_calibration())
        .map(|a| ActivityRecord {
            subject_id: session.subject_id.clone(),
            activity: a.truth.activity,
            series: a.series.clone(),
            truth: a.observed,
            pedometer: a.pedometer,
        })
        .collect();

    let config = DetectionConfig::default();
    for form in [ModelForm::Linear, ModelForm::Quadratic] {
        let model = calibrate_records(&session.subject_id, &records, &config, form).unwrap();
        println!("{form:?}: coefficients {:?}", model.coefficients);
        println!("  residual RMS {:.4} m, fitted peak range {:.2}-{:.2} g", model.residual_rms_m, model.domain_g.0, model.domain_g.1);
        for (p, r) in model.fit_points.iter().zip(model.residuals()) {
            println!("  {:<6} peak {:.3} g  length {:.3} m  residual {:+.4}", p.activity.label(), p.mean_peak_g, p.mean_step_length_m, r);
        }
        for g in [0.5, 1.2, 3.5] {
            let pred = model.predict(g);
            println!("  predict({g} g) = {:.3} m{}", pred.length_m, if pred.flagged() { " (extrapolated)" } else { "" });
        }
    }
    println!("generator law: L = 0.45 + 0.5 a");
}
