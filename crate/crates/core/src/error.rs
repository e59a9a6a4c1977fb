use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{n} is not a sum of two squares")]
    NotSumOfTwoSquares { n: u64 },

    #[error("n must be positive")]
    ZeroRadius,

    #[error("grid of {cells} cells is too coarse for n = {n} (need at least {required})")]
    GridTooCoarse { cells: usize, n: u64, required: usize },

    #[error("eigenfunction is not monochromatic (frequencies of different norms)")]
    NotMonochromatic,

    #[error("coefficient of frequency ({0}, {1}) violates conjugate symmetry")]
    ConjugateSymmetry(i64, i64),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("argument outside the supported envelope: {0}")]
    OutOfEnvelope(String),

    #[error("root finding did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
