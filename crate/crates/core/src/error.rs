use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("level {level} out of range for grid of depth {depth}")]
    LevelOutOfRange { level: u32, depth: u32 },

    #[error("cube (level {level}) does not belong to this grid")]
    CubeMismatch { level: u32 },

    #[error("functions live on different grids")]
    GridMismatch,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("expected {expected} values, found {found}")]
    ValueCount { expected: usize, found: usize },

    #[error("negative value {value} at cell {cell} in a weight")]
    NegativeWeight { cell: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate complementary function: {0}")]
    DegenerateConjugate(String),

    #[error("bisection did not converge after {iterations} iterations")]
    NoConvergence { iterations: u32 },

    #[error("degenerate weight: {0}")]
    DegenerateWeight(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
