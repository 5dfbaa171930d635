use thiserror::Error;

use crate::engine::SearchStats;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("not a bijection: {0}")]
    NotBijection(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid vertex sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at byte {offset}: {message}")]
    Graph6 { offset: usize, message: String },

    #[error("parse error on line {line}: {message}")]
    Dimacs { line: usize, message: String },

    #[error("node budget of {budget} exceeded")]
    BudgetExceeded { budget: u64, stats: Box<SearchStats> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
