use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: timestamps not strictly increasing at line {line} ({previous} -> {current})")]
    Integrity {
        path: PathBuf,
        line: u64,
        previous: i64,
        current: i64,
    },

    #[error("json error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("streams do not overlap (accel {accel:?} ms, gyro {gyro:?} ms)")]
    NoOverlap { accel: (i64, i64), gyro: (i64, i64) },

    #[error("too short: {0}")]
    TooShort(String),

    #[error("grid instant {instant_ms} ms outside stream range [{first_ms}, {last_ms}]")]
    Extrapolation {
        instant_ms: i64,
        first_ms: i64,
        last_ms: i64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("filter design failed: {0}")]
    FilterDesign(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid genome: {0}")]
    InvalidGenome(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("undefined rate: {0}")]
    UndefinedRate(String),

    #[error("policy error: {0}")]
    Policy(String),

    #[error("dataset error: {0}")]
    Dataset(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag used in the CLI's JSON error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::Integrity { .. } => "integrity",
            Error::Json { .. } => "json",
            Error::NoOverlap { .. } => "no_overlap",
            Error::TooShort(_) => "too_short",
            Error::Extrapolation { .. } => "extrapolation",
            Error::Config(_) => "config",
            Error::FilterDesign(_) => "filter_design",
            Error::Shape(_) => "shape",
            Error::Input(_) => "input",
            Error::InvalidGenome(_) => "invalid_genome",
            Error::Training(_) => "training",
            Error::UndefinedRate(_) => "undefined_rate",
            Error::Policy(_) => "policy",
            Error::Dataset(_) => "dataset",
        }
    }
}
