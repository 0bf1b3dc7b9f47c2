use std::path::PathBuf;

use crate::activity::Activity;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: format error: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("timestamps not strictly increasing at data row {row}")]
    Ordering { row: usize },

    #[error("non-finite or invalid value at data row {row}, column `{column}`")]
    Value { row: usize, column: &'static str },

    #[error("unknown activity label `{0}`")]
    UnknownActivity(String),

    #[error("calibration activity {activity} is missing {field}")]
    Incomplete {
        activity: Activity,
        field: &'static str,
    },

    #[error("{0}")]
    Degenerate(String),

    #[error("invalid filter: {0}")]
    FilterSpec(String),

    #[error("series has {len} samples; at least {required} are needed")]
    TooShort { len: usize, required: usize },

    #[error("series is irregularly sampled; resample before filtering")]
    Irregular,

    #[error("{activity}: only {steps} steps detected, at least 3 are needed for calibration")]
    InsufficientSteps { activity: Activity, steps: usize },

    #[error("least-squares design is degenerate: {0}")]
    DegenerateDesign(String),

    #[error("{points} points cannot determine {coefficients} coefficients")]
    Underdetermined { points: usize, coefficients: usize },

    #[error("average step length undefined for zero steps")]
    UndefinedAverage,

    #[error("{0} is undefined for this input")]
    Undefined(&'static str),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("cycle spans {len} samples; at least 4 are needed")]
    ShortCycle { len: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("output directory {0} is not empty; pass force to overwrite")]
    Collision(PathBuf),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
