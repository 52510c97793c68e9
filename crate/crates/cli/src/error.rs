//! Pipeline errors, tagged with the stage that failed.

use thiserror::Error;

#[derive(Debug, Error)]
#[error("[{stage}] {message}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub message: String,
}

impl PipelineError {
    pub fn new(stage: &'static str, message: impl ToString) -> Self {
        Self { stage, message: message.to_string() }
    }
}

/// Attach a stage name to any error of this step.
pub fn at_stage<T, E: ToString>(
    stage: &'static str,
    result: Result<T, E>,
) -> Result<T, PipelineError> {
    result.map_err(|e| PipelineError::new(stage, e.to_string()))
}

pub type PipelineResult<T> = Result<T, PipelineError>;
