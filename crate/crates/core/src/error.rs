use std::path::PathBuf;

use thiserror::Error;

use crate::scheme::Format;
use crate::trit::TritError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Trit(#[from] TritError),

    #[error("format {m}x{n}x{p} exceeds capacity (each of mn, np, pm must be <= 64 and every side <= 16)")]
    CapacityExceeded { m: usize, n: usize, p: usize },

    #[error("format has a zero dimension")]
    EmptyFormat,

    #[error("formats {0} and {1} cannot be combined")]
    FormatMismatch(Format, Format),

    #[error("dimension too small for this operation in {0}")]
    DimensionTooSmall(Format),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("coefficient outside {{-1, 0, 1}}: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("scheme does not satisfy the Brent equations: {0}")]
    NotVerified(String),

    #[error("the initial population is empty")]
    EmptyPopulation,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
