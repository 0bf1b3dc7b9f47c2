//! Gait events, step counts and travel distance from the anteroposterior
//! channel of a single waist-worn accelerometer.
//!
//! The pipeline is: [`signal_io`] reads traces and session manifests,
//! [`preprocess`] low-pass filters, [`step_detect`] finds one peak per step
//! and locates initial contacts, [`calibration`] fits a per-subject
//! peak-to-step-length model on the speed-calibration activities,
//! [`estimate`] turns steps into distance, cadence and speed, [`gaitmap`]
//! builds phase-normalized cycle maps and [`metrics`] scores estimates
//! against ground truth. [`synth`] generates sessions with known truth.

pub mod activity;
pub mod calibration;
pub mod error;
pub mod estimate;
pub mod gaitmap;
pub mod metrics;
pub mod pipeline;
pub mod preprocess;
pub mod signal_io;
pub mod step_detect;
pub mod synth;

pub use activity::{Activity, Cohort};
pub use error::{Error, Result};
