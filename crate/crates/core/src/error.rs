use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient signal: need at least {needed} samples, got {got}")]
    InsufficientSignal { needed: usize, got: usize },

    #[error("invalid {what}: {reason}")]
    Domain { what: &'static str, reason: String },

    #[error("{what} {value} out of range; valid interval is [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("no fundamental detected")]
    NoFundamental,

    #[error("no common band between speaker responses")]
    NoCommonBand,

    #[error("partial {harmonic} at {frequency:.2} Hz leaves the evaluable band [{min:.2}, {max:.2}] Hz")]
    PartialOutOfBand {
        harmonic: u32,
        frequency: f64,
        min: f64,
        max: f64,
    },

    #[error("{source_name}, line {line}: {reason}")]
    Parse {
        source_name: String,
        line: usize,
        reason: String,
    },

    #[error("checksum mismatch for bundled table {name}")]
    Checksum { name: &'static str },

    #[error("no decodable corpus entries: {}", format_failures(.0))]
    Undecodable(Vec<(PathBuf, String)>),

    #[error("wav {path}: {source}")]
    Wav {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_failures(failures: &[(PathBuf, String)]) -> String {
    failures
        .iter()
        .map(|(p, why)| format!("{}: {}", p.display(), why))
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn domain(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            what,
            reason: reason.into(),
        }
    }

    pub(crate) fn out_of_range(what: &'static str, value: f64, min: f64, max: f64) -> Self {
        Error::OutOfRange {
            what,
            value,
            min,
            max,
        }
    }
}
