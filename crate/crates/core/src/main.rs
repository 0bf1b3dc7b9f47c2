use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gaitcf::calibration::{read_model, write_model, ModelForm};
use gaitcf::metrics::{render_rate_table, CohortGroup, GroupingSpec};
use gaitcf::pipeline::{
    analyze_manifest, calibrate_manifest, gaitmap_manifest, report_dir, trace_events, DetectionConfig,
};
use gaitcf::preprocess::FilterSpec;
use gaitcf::signal_io::{events_csv_string, write_events_csv, write_gaitmap_csv, write_report, DEFAULT_RATE_HZ};
use gaitcf::step_detect::PeakParams;
use gaitcf::synth::{generate_cohort, write_cohort, CohortSpec};

#[derive(Parser)]
#[command(name = "gaitcf", version, about = "Gait features from a waist-worn accelerometer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct DetectArgs {
    /// Low-pass cutoff frequency.
    #[arg(long, default_value_t = 3.0)]
    cutoff_hz: f64,
    /// Butterworth order (2, 4, 6 or 8).
    #[arg(long, default_value_t = 4)]
    filter_order: usize,
    /// Filter forward only instead of forward-backward.
    #[arg(long)]
    no_zero_phase: bool,
    #[arg(long, default_value_t = 0.25)]
    min_separation_s: f64,
    #[arg(long, default_value_t = 0.05)]
    min_prominence_g: f64,
}

impl DetectArgs {
    fn config(self) -> DetectionConfig {
        DetectionConfig {
            filter: FilterSpec {
                cutoff_hz: self.cutoff_hz,
                order: self.filter_order,
                zero_phase: !self.no_zero_phase,
            },
            peaks: PeakParams {
                min_separation_s: self.min_separation_s,
                min_prominence_g: self.min_prominence_g,
            },
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Detect steps, ICs and TOs in one trace.
    Events {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RATE_HZ)]
        rate_hz: f64,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        detect: DetectArgs,
    },
    /// Fit a subject's step-length model from the calibration activities.
    Calibrate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "linear")]
        form: ModelForm,
        #[command(flatten)]
        detect: DetectArgs,
    },
    /// Estimate features for every activity of a session.
    Analyze {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        detect: DetectArgs,
    },
    /// Phase-normalized gait maps of a session.
    Gaitmap {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        detect: DetectArgs,
    },
    /// Agreement statistics over every estimates.csv under a directory.
    Report {
        #[arg(long)]
        results_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Print the per-activity error-rate table.
        #[arg(long)]
        table: bool,
        /// Debug: error rate in its literal typeset form.
        #[arg(long, hide = true)]
        literal_error_rate: bool,
    },
    /// Generate a synthetic cohort with truth sidecars.
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 3)]
        subjects_td: usize,
        #[arg(long, default_value_t = 3)]
        subjects_dmd: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Omit for noise-free traces.
        #[arg(long)]
        snr_db: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_RATE_HZ)]
        rate_hz: f64,
        /// Perturb the observed values written to the manifests.
        #[arg(long)]
        observation_noise: bool,
        /// Write into a non-empty directory.
        #[arg(long)]
        force: bool,
    },
}

fn run(cli: Cli) -> gaitcf::Result<()> {
    match cli.command {
        Command::Events {
            trace,
            rate_hz,
            out,
            detect,
        } => {
            let rows = trace_events(&trace, rate_hz, &detect.config())?;
            match out {
                Some(path) => write_events_csv(&rows, path)?,
                None => print!("{}", events_csv_string(&rows)),
            }
        }
        Command::Calibrate {
            manifest,
            out,
            form,
            detect,
        } => {
            let model = calibrate_manifest(&manifest, &detect.config(), form)?;
            log::info!(
                "{}: coefficients {:?}, residual RMS {:.4} m",
                model.subject_id,
                model.coefficients,
                model.residual_rms_m
            );
            write_model(&model, out)?;
        }
        Command::Analyze {
            manifest,
            model,
            out_dir,
            detect,
        } => {
            let model = read_model(model)?;
            let out = analyze_manifest(&manifest, &model, &out_dir, &detect.config())?;
            log::info!("wrote {} and {} events files", out.estimates_csv.display(), out.events_csvs.len());
        }
        Command::Gaitmap {
            manifest,
            out,
            detect,
        } => write_gaitmap_csv(&gaitmap_manifest(&manifest, &detect.config())?, out)?,
        Command::Report {
            results_dir,
            out,
            table,
            literal_error_rate,
        } => {
            let spec = GroupingSpec {
                literal_error_rate,
                ..GroupingSpec::default()
            };
            let report = report_dir(&results_dir, &spec)?;
            if report.omitted_groups > 0 {
                log::info!("{} empty groups omitted", report.omitted_groups);
            }
            write_report(&report.rows, out)?;
            if table {
                print!("{}", render_rate_table(&report, CohortGroup::All));
            }
        }
        Command::Synth {
            out_dir,
            subjects_td,
            subjects_dmd,
            seed,
            snr_db,
            rate_hz,
            observation_noise,
            force,
        } => {
            let spec = CohortSpec {
                n_td: subjects_td,
                n_dmd: subjects_dmd,
                seed,
                snr_db: snr_db.unwrap_or(f64::INFINITY),
                rate_hz,
                observation_noise,
                ..CohortSpec::default()
            };
            let manifests = write_cohort(&generate_cohort(&spec)?, &out_dir, force)?;
            for m in manifests {
                println!("{}", m.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
