use thiserror::Error;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("invalid walk measure: {0}")]
    Measure(String),
    #[error("invalid walk configuration: {0}")]
    Config(String),
    #[error("too few samples: {count} (need at least {needed})")]
    TooFewSamples { count: usize, needed: usize },
    #[error("could not build worker pool: {0}")]
    Pool(String),
    #[error("malformed measure file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, WalkError>;
