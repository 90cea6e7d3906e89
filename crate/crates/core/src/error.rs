use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid generator index {index} for free group of rank {rank}")]
    InvalidGenerator { index: i32, rank: usize },

    #[error("invalid permutation for generator {generator}: {reason}")]
    InvalidPermutation { generator: usize, reason: String },

    #[error("vertex count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("d*n must be even for the configuration model (d={d}, n={n})")]
    OddHalfEdges { d: usize, n: usize },

    #[error("window mismatch between distributions")]
    WindowMismatch,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid labeling: {0}")]
    InvalidLabeling(String),

    #[error("local map has no entry for pattern {0:?}")]
    MissingTableEntry(Vec<u8>),

    #[error("value {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("enumeration infeasible: {0}")]
    EnumerationInfeasible(String),

    #[error("enumeration budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },

    #[error("invalid parameter: {0}")]
    Config(String),

    #[error("point sets are not nested: {0}")]
    NotNested(String),

    #[error("L-truncation infeasible: {simplices} simplices exceeds guard of {guard}")]
    TruncationInfeasible { simplices: usize, guard: usize },

    #[error("not a partition: {0}")]
    NotPartition(String),

    #[error("postcondition failed: {0}")]
    Postcondition(String),
}
