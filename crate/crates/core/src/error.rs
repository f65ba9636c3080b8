use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sequence")]
    EmptyInput,

    /// `position` is 1-based.
    #[error("invalid symbol {symbol:?} at position {position}")]
    InvalidSymbol { position: usize, symbol: char },

    #[error("sequence length {0} outside supported range 1..={max}", max = crate::seq::MAX_LEN)]
    UnsupportedLength(usize),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no admissible sequence for n={n} d={d} w={w} after {attempts} attempts")]
    Exhausted {
        n: usize,
        d: usize,
        w: usize,
        attempts: u64,
    },

    #[error("graph too large: {vertices} vertices exceeds budget of {limit}")]
    TooLarge { vertices: u64, limit: u64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing `p edge` header")]
    MissingHeader,

    #[error("vertex index {index} out of range for graph with {len} vertices")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("vertices {a} and {b} are not adjacent")]
    NotAClique { a: usize, b: usize },

    #[error("search budget exceeded after {nodes} nodes (best clique so far: {best_size})")]
    BudgetExceeded { nodes: u64, best_size: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
