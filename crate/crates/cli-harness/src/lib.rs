//! Experiment orchestration: flat key-value configs, deterministic result
//! records with content hashes, and the pipelines behind the `lrp` CLI.

pub mod config;
pub mod pipelines;
pub mod record;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("run error: {0}")]
    Run(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub use config::{parse_config, ExperimentConfig, Pipeline, TOLERANCE_DEFAULTS};
pub use record::{
    blob_hash, emit_results, md_summary, sha256_hex, EmitFormat, ResultRecord, RunStatus, Verdict,
};
