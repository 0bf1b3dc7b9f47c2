// Train on SC-L1..SC-L5, evaluate on 6MWT, 100MRW and free walk, and
// summarize agreement with ground truth across a synthetic cohort.

use gaitcf::calibration::ModelForm;
use gaitcf::metrics::{
    build_report, pairs_from_estimates, render_agreement_table, render_rate_table, CohortGroup, GroupingSpec,
};
use gaitcf::pipeline::{run_session, DetectionConfig};
use gaitcf::signal_io::ActivityRecord;
use gaitcf::synth::{generate_cohort, CohortSpec};

fn main() {
    let cohort = generate_cohort(&CohortSpec {
        n_td: 3,
        n_dmd: 3,
        seed: 2024,
        snr_db: 20.0,
        ..CohortSpec::default()
    })
    .unwrap();

    let config = DetectionConfig::default();
    let mut rows = Vec::new();
    for s in &cohort {
        let records: Vec<ActivityRecord> = s
            .activities
            .iter()
            .map(|a| ActivityRecord {
                subject_id: s.subject_id.clone(),
                activity: a.truth.activity,
                series: a.series.clone(),
                truth: a.observed,
                pedometer: a.pedometer,
            })
            .collect();
        let (model, results) = run_session(&s.subject_id, &records, &config, ModelForm::Linear).unwrap();
        println!("{} model: L = {:.3} + {:.3} a", s.subject_id, model.intercept(), model.slope());
        rows.extend(results.iter().map(|r| r.row(Some(s.cohort))));
    }

    let report = build_report(&pairs_from_estimates(&rows), &GroupingSpec::default());
    println!("\nError rates, all subjects\n{}", render_rate_table(&report, CohortGroup::All));
    println!("Agreement, all subjects\n{}", render_agreement_table(&report, CohortGroup::All));
}
