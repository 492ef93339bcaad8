use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A probability table failed validation (negative, non-finite, or not normalized).
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A scalar argument fell outside its mathematical domain.
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("{what} = {value} is out of range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: i128,
        min: i128,
        max: i128,
    },

    /// The inversion-about-average step requires the output qubit to factor out.
    #[error("diffusion applied while the output register is entangled with the input register (residual {residual:e})")]
    EntangledOutput { residual: f64 },

    /// A full iteration was requested while the output register still holds |1>.
    #[error("grover iteration requires the output register in |0> (P(output = 1) = {0:e})")]
    OutputNotReset(f64),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("schedule line {line}: {message}")]
    Schedule { line: usize, message: String },

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error("report parse error: {0}")]
    Report(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn out_of_range(what: &'static str, value: impl Into<i128>, min: impl Into<i128>, max: impl Into<i128>) -> Self {
        Error::OutOfRange {
            what,
            value: value.into(),
            min: min.into(),
            max: max.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
