//! Pipeline runner, file formats and figure emission for the connectivity
//! toolkit: configuration parsing, recording/matrix containers, circular
//! graph rendering and the end-to-end `run` orchestration.

pub mod config;
pub mod error;
pub mod matrix_io;
pub mod pipeline;
pub mod recording_io;
pub mod render;

pub use config::PipelineConfig;
pub use error::{PipelineError, PipelineResult};
pub use pipeline::{run_pipeline, write_synth_recordings, RunReport};
