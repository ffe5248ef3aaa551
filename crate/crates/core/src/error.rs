use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty index set")]
    EmptyIndexSet,

    #[error("invalid smoothness vector: {0}")]
    InvalidSmoothness(String),

    #[error("assumption violated for r={r:?}, k={k}: {reason}")]
    Assumption { r: Vec<i64>, k: i64, reason: String },

    #[error("invalid multi-index: {0}")]
    InvalidMultiIndex(String),

    #[error("classification is not unique for {alpha:?}: {candidates:?}")]
    NonUniqueClass {
        alpha: Vec<u32>,
        candidates: Vec<Vec<usize>>,
    },

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("polynomial mismatch: {0}")]
    Mismatch(String),

    #[error("singular matrix: rank {rank} of {size}")]
    Singular { size: usize, rank: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("mesh: {0}")]
    Mesh(String),

    #[error("patch: {0}")]
    Patch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
