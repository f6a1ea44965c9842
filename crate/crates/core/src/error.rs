use std::path::PathBuf;

use thiserror::Error;

/// Every failure the laboratory can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: expected {expected} values, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("gauged form requires reference data (the frozen initial spectrum)")]
    MissingReference,

    #[error("non-finite value at t = {time}")]
    NonFinite { time: f64 },

    #[error("blow-up guard tripped at t = {time}: |coefficient| = {magnitude:e}")]
    BlowUp { time: f64, magnitude: f64 },

    #[error("cost guard: {0}")]
    CostGuard(String),

    #[error("resonant quadruple {witness:?} has non-vanishing numerator {numerator:e}")]
    NonVanishingNumerator { witness: [i64; 4], numerator: f64 },

    #[error("imaginary residue {residue:e} exceeds tolerance {tolerance:e}")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    #[error("degenerate bound: {0}")]
    Degenerate(String),

    #[error("malformed snapshot {path}: {reason}")]
    Snapshot { path: PathBuf, reason: String },

    #[error("config error in {path}: {reason}")]
    Config { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
