use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range (n = {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("malformed strategy: {0}")]
    MalformedStrategy(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("support of message {0} is empty")]
    EmptySupport(usize),

    #[error("set {index} has weight {weight}, expected {expected}")]
    WeightViolation {
        index: usize,
        weight: usize,
        expected: usize,
    },

    #[error("sets {first} and {second} intersect in {size} elements, more than {limit}")]
    IntersectionViolation {
        first: usize,
        second: usize,
        size: usize,
        limit: usize,
    },

    #[error("not an equiangular tight frame: {0}")]
    NotEtf(String),

    #[error("closed form degenerate: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("bound conflict at {cell}: lower {lower} > upper {upper}; provenance: {provenance}")]
    BoundConflict {
        cell: String,
        lower: String,
        upper: String,
        provenance: String,
    },

    #[error("missing bundled data: {0}")]
    MissingData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
