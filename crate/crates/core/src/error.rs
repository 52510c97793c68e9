//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by signal processing, connectivity estimation and montage
/// handling.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Invalid parameters (filter edges vs Nyquist, empty band, bad spec).
    #[error("configuration error: {0}")]
    Config(String),

    /// Invalid input data (shape mismatch, too-short signal, missing channel).
    #[error("input error: {0}")]
    Input(String),

    /// An estimator cannot produce a meaningful value (too few Welch
    /// segments, all in-band bins degenerate).
    #[error("estimation error: {0}")]
    Estimation(String),

    /// Instantaneous phase is undefined (all-zero signal).
    #[error("degenerate phase: {0}")]
    DegeneratePhase(String),

    /// Electrode label does not conform to the 10-5 grammar.
    #[error("label parse error: {0}")]
    LabelParse(String),

    /// One or more electrode prefixes have no region assignment.
    #[error("classification error: unknown region for {}", .0.join(", "))]
    Classification(Vec<String>),
}

pub type Result<T> = std::result::Result<T, CoreError>;
