use thiserror::Error;

#[derive(Debug, Error)]
pub enum PercError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("memory estimate {required} bytes exceeds budget {budget} bytes")]
    MemoryBudget { required: u64, budget: u64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
