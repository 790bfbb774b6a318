use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gradient requested at |xi| = {norm:e}, inside the exclusion radius {radius:e}")]
    OriginSingular { norm: f64, radius: f64 },

    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("solver produced a non-finite value at t = {time}")]
    SolverDiverged { time: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
