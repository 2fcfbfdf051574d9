//! File formats, experiment registry and configuration for the `kakutani`
//! command-line tool.

pub mod config;
pub mod experiments;
pub mod formats;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("expansion guard exceeded: {0}")]
    ExpansionGuard(String),
    #[error("{0}")]
    Failed(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl ExperimentError {
    pub(crate) fn failed<E: std::fmt::Display>(e: E) -> Self {
        ExperimentError::Failed(e.to_string())
    }
}
