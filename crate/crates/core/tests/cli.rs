use std::path::Path;
use std::process::{Command, Output};

fn gaitcf(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaitcf"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run gaitcf")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = gaitcf(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn full_workflow() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let listed = ok(
        &["synth", "--out-dir", "data", "--subjects-td", "1", "--subjects-dmd", "1", "--seed", "3", "--snr-db", "25"],
        dir,
    );
    assert_eq!(listed.lines().count(), 2);

    for subject in ["TD01", "DMD01"] {
        let manifest = format!("data/{subject}/manifest.toml");
        let model = format!("{subject}.toml");
        ok(&["calibrate", "--manifest", &manifest, "--out", &model], dir);
        let text = std::fs::read_to_string(dir.join(&model)).unwrap();
        assert!(text.contains("coefficients"));
        ok(&["analyze", "--manifest", &manifest, "--model", &model, "--out-dir", &format!("results/{subject}")], dir);
        assert!(dir.join(format!("results/{subject}/estimates.csv")).is_file());
        assert!(dir.join(format!("results/{subject}/events_6MWT.csv")).is_file());
        ok(&["gaitmap", "--manifest", &manifest, "--out", &format!("{subject}_map.csv")], dir);
    }

    let table = ok(&["report", "--results-dir", "results", "--out", "report.csv", "--table"], dir);
    assert!(table.contains("6MWT+100MRW+FW"));
    let report = std::fs::read_to_string(dir.join("report.csv")).unwrap();
    assert!(report.lines().count() > 30);

    let events = ok(&["events", "--trace", "data/TD01/FW.csv"], dir);
    assert!(events.lines().count() > 100);
}

#[test]
fn synth_refuses_non_empty_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["synth", "--out-dir", "data", "--subjects-td", "1", "--subjects-dmd", "0"];
    ok(&args, tmp.path());
    let again = gaitcf(&args, tmp.path());
    assert!(!again.status.success());
    assert!(String::from_utf8_lossy(&again.stderr).starts_with("error:"));

    let mut forced = args.to_vec();
    forced.push("--force");
    ok(&forced, tmp.path());
}

#[test]
fn invalid_filter_settings_fail() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["synth", "--out-dir", "d", "--subjects-td", "1", "--subjects-dmd", "0"], tmp.path());
    let out = gaitcf(&["events", "--trace", "d/TD01/FW.csv", "--cutoff-hz", "80"], tmp.path());
    assert!(!out.status.success());
}

#[test]
fn missing_manifest_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = gaitcf(&["calibrate", "--manifest", "nope.toml", "--out", "m.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
}
