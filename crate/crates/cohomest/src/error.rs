use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("divergent series: {0}")]
    Divergence(String),

    #[error("exponent overflow: {0}")]
    Overflow(String),

    #[error("near resonance at k = {k:?} (|divisor| = {magnitude:.3e})")]
    NearResonance { k: Vec<i64>, magnitude: f64 },

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("precision exhausted after {depth} partial quotients")]
    PrecisionExhausted { depth: usize },

    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("functional undefined: {0}")]
    Undefined(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) => 3,
            Error::Io { .. } | Error::Csv { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
