use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),

    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),

    #[error("duplicate edge record {0:?} -> {1:?}")]
    DuplicateEdge(String, String),

    #[error("edge {0:?} -> {1:?} has nonpositive multiplicity {2}")]
    NonPositiveMultiplicity(String, String, i64),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("matrix entry at ({row}, {col}) is negative ({value})")]
    NegativeEntry { row: usize, col: usize, value: i64 },

    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("move not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("undecided, cap exceeded: {what} has size {size}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u128,
    },

    #[error("construction check failed: {0}")]
    Construction(String),
}
