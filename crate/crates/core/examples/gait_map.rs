// Phase-normalized step cycles: typical versus dystrophic morphology.

use gaitcf::activity::{Activity, Cohort};
use gaitcf::gaitmap::{subject_maps, MapScope};
use gaitcf::pipeline::{record_cycles, DetectionConfig};
use gaitcf::signal_io::ActivityRecord;
use gaitcf::synth::{generate_cohort, CohortSpec};

fn main() {
    let cohort = generate_cohort(&CohortSpec {
        n_td: 1,
        n_dmd: 1,
        seed: 9,
        ..CohortSpec::default()
    })
    .unwrap();

    for s in &cohort {
        let records: Vec<ActivityRecord> = s
            .activities
            .iter()
            .filter(|a| a.truth.activity == Activity::FreeWalk)
            .map(|a| ActivityRecord {
                subject_id: s.subject_id.clone(),
                activity: a.truth.activity,
                series: a.series.clone(),
                truth: a.observed,
                pedometer: a.pedometer,
            })
            .collect();
        let cycles = record_cycles(&records, &DetectionConfig::default()).unwrap();
        let map = subject_maps(&cycles)
            .into_iter()
            .find(|m| m.scope == MapScope::Activity(Activity::FreeWalk))
            .unwrap();
        let label = if s.cohort == Cohort::Td { "TD-like" } else { "DMD-like" };
        println!("{} ({label}), {} cycles", s.subject_id, map.n_cycles);
        for k in (0..=100).step_by(5) {
            let bar = "#".repeat((map.mean_cycle[k].max(0.0) * 40.0).round() as usize);
            println!("  {k:>3}% {:>6.3} ±{:.3} {bar}", map.mean_cycle[k], map.sd_cycle[k]);
        }
    }
}
