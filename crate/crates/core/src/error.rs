use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("non-binary label set: {labels:?}")]
    LabelSet { labels: Vec<String> },

    #[error("config error: {0}")]
    Config(String),

    #[error("cost ordering violated: {0}")]
    CostOrdering(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("schema version mismatch: expected {expected}, found {found}")]
    SchemaVersion { expected: u32, found: u32 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("conditioned constraint requires a model-score context")]
    MissingScoreContext,

    #[error("uncertain set of size {size} exceeds brute-force limit {limit}; use greedy_assign")]
    BruteForceLimit { size: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
