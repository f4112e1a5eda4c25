use thiserror::Error;

use crate::scalar::TropScalar;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{op}: expected a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("invalid matrix shape: {0}")]
    InvalidShape(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{op}: size {size} exceeds the cap {cap}")]
    SizeCap {
        op: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("Kleene star diverges: spectral radius {lambda} > 0")]
    KleeneDivergence { lambda: TropScalar },

    #[error("subgraph is not admissible: {0}")]
    InvalidSubgraph(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("t = {t} is below the threshold {threshold}")]
    BelowThreshold { t: u64, threshold: u64 },

    /// A constructive reconstruction did not reproduce its target. This would
    /// contradict a theorem the construction relies on.
    #[error("{context}: reconstruction mismatch at ({i}, {j}): expected {expected}, got {found}")]
    ReconstructionFailure {
        context: &'static str,
        i: usize,
        j: usize,
        expected: TropScalar,
        found: TropScalar,
    },

    #[error("certificate bound violated: sum of cycle lengths {sum} > tropical rank {rank}")]
    BoundViolated { sum: usize, rank: usize },

    #[error("factor rank search exhausted: rank lies in [{lower}, {upper}]")]
    FactorSearchExhausted { lower: usize, upper: usize },

    #[error("words must be nonempty")]
    EmptyWord,

    #[error("identity sides must differ")]
    TrivialIdentity,

    #[error("base identity {name} rejected: {detail}")]
    AdmissionFailed { name: String, detail: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
