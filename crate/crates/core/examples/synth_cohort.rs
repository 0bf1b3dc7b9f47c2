// File-based workflow: write a synthetic cohort, then calibrate, analyze
// and report exactly as the command line does.
//
//     cargo run --example synth_cohort -- [out_dir]

use gaitcf::calibration::{write_model, ModelForm};
use gaitcf::metrics::{render_rate_table, CohortGroup, GroupingSpec};
use gaitcf::pipeline::{analyze_manifest, calibrate_manifest, report_dir, DetectionConfig};
use gaitcf::signal_io::write_report;
use gaitcf::synth::{generate_cohort, write_cohort, CohortSpec};

fn main() {
    let tmp = tempfile::tempdir().unwrap();
    let root = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| tmp.path().to_path_buf());

    let spec = CohortSpec {
        n_td: 1,
        n_dmd: 1,
        seed: 42,
        snr_db: 20.0,
        ..CohortSpec::default()
    };
    let manifests = write_cohort(&generate_cohort(&spec).unwrap(), root.join("data"), true).unwrap();

    let config = DetectionConfig::default();
    for manifest in &manifests {
        let subject = manifest.parent().unwrap().file_name().unwrap();
        let model = calibrate_manifest(manifest, &config, ModelForm::Linear).unwrap();
        write_model(&model, root.join("models").join(subject).with_extension("toml")).unwrap();
        let out = analyze_manifest(manifest, &model, root.join("results").join(subject), &config).unwrap();
        println!("{}: {} activities -> {}", model.subject_id, out.rows.len(), out.estimates_csv.display());
    }

    let report = report_dir(root.join("results"), &GroupingSpec::default()).unwrap();
    write_report(&report.rows, root.join("report.csv")).unwrap();
    println!("\n{}", render_rate_table(&report, CohortGroup::All));
    println!("report: {}", root.join("report.csv").display());
}
