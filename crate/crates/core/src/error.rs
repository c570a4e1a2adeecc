use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("graph is not present in the lookup table")]
    UnknownGraph,

    #[error("query budget exhausted after {limit} queries")]
    BudgetExhausted { limit: u64 },

    #[error("no boundary along the search direction")]
    NoBoundary,

    #[error("degenerate QEGC target: p_old = {p_old}, p_max = {p_max}")]
    DegenerateTarget { p_old: f64, p_max: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },

    #[error("node {node} references missing graph id {graph}")]
    DanglingNode { node: usize, graph: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
