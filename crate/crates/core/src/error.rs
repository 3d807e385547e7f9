use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("universe of {n} points exceeds the supported maximum of {max}")]
    UniverseTooLarge { n: usize, max: usize },
    #[error("exhaustive enumeration over {n} points exceeds the cap of {max}")]
    EnumerationTooLarge { n: usize, max: usize },
    #[error("bitmask {bits:#x} has bits outside a universe of {n} points")]
    BitsOutOfUniverse { bits: u64, n: usize },
    #[error("index {index} out of range for a universe of {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("universe size mismatch: {left} vs {right}")]
    UniverseMismatch { left: usize, right: usize },
    #[error("invalid upper-zero specification: {0}")]
    InvalidSpec(String),
    #[error("invalid sample budget: {0}")]
    InvalidBudget(String),
    #[error("candidate list is empty")]
    EmptyCandidates,
    #[error("invalid structure sizes: {0}")]
    InvalidSizes(String),
    #[error("binomial coefficient overflow")]
    Overflow,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("cannot fit an empty subset")]
    EmptySubset,
    #[error("linear program failed: {0}")]
    Solver(String),
    #[error("oracle does not supply a basis")]
    NoBasis,
    #[error("input set is infeasible")]
    InfeasibleInput,
    #[error("oracle is not monotone: {0}")]
    NotMonotone(String),
    #[error("order is not a permutation of 0..{0}")]
    InvalidOrder(usize),
    #[error("search limit exceeded after {nodes} nodes at depth {depth}")]
    ResourceLimit {
        depth: usize,
        nodes: usize,
        /// Best feasible set known when the limit was hit, without an optimality certificate.
        partial: Option<Box<crate::solvers::SolveReport>>,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
