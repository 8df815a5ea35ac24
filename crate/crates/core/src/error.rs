use thiserror::Error;

use crate::doors::Observation;
use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game configuration: {0}")]
    Config(String),

    #[error("invalid model: {0}")]
    InvalidModel(ValidationReport),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("enumeration would produce {count} pure strategies, above the cap of {cap}")]
    CapExceeded { count: String, cap: u64 },

    #[error("observation {0} is not legal for this game")]
    IllegalObservation(Observation),

    #[error("unreachable observation {0}")]
    Unreachable(Observation),

    #[error("zero posterior mass")]
    ZeroPosteriorMass,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error(
        "solver did not converge after {iterations} pivots \
         (lower {lower}, upper {upper}, gap {gap:e})"
    )]
    NonConvergence {
        iterations: usize,
        lower: f64,
        upper: f64,
        gap: f64,
    },

    #[error("model file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
