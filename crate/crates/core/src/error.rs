use std::io;

use thiserror::Error;

/// Errors raised by the spectral, norm, data and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("size mismatch: expected {expected} values, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("block index {q} outside resolvable range [{min}, {max}]")]
    BlockOutOfRange { q: i32, min: i32, max: i32 },
    #[error("exponent {0} outside [0, 1)")]
    InvalidExponent(f64),
    #[error("spectrum overflow: {0}")]
    SpectrumOverflow(String),
    #[error("time sampling is empty")]
    EmptySampling,
    #[error("unsupported norm parameters: {0}")]
    UnsupportedNorm(String),
    #[error("argument outside domain: {0}")]
    OutOfDomain(String),
    #[error("trajectory does not cover ({from:e}, {to:e})")]
    Coverage { from: f64, to: f64 },
    #[error("cube Q_q not resolvable; need at least {min_grid} points per axis")]
    Unresolvable { min_grid: u64 },
    #[error("empty frequency band")]
    EmptyBand,
    #[error("kernel time {t:e} outside resolvable window [{lo:e}, {hi:e}]")]
    KernelWindow { t: f64, lo: f64, hi: f64 },
    #[error("time step failure: {0}")]
    StepFailure(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed field file at byte offset {offset}: {msg}")]
    Format { offset: u64, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
