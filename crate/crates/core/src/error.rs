//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parsers, validators, and the analysis operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Document(String),

    #[error("point has {got} coordinates, expected {expected}")]
    WrongArity { expected: usize, got: usize },

    #[error("duplicate point ({0})")]
    DuplicatePoint(String),

    #[error("invalid rational literal {0:?}")]
    InvalidRational(String),

    #[error("operation requires a non-empty point set")]
    EmptySet,

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("function domain mismatch: {0}")]
    FunctionDomain(String),

    #[error("invalid anchor: {0}")]
    InvalidAnchor(String),

    #[error("matrix/vector dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("zero vector has no primitive integer form")]
    ZeroVector,

    #[error("point set is not good")]
    NotGood,

    #[error("point ({0}) is not in the set")]
    PointNotInSet(String),

    #[error("subset is not a maximal good subset: {0}")]
    NotMaximalGood(String),

    #[error("point ({0}) already lies in the maximal good subset")]
    ApexInsideSubset(String),

    #[error("set is not a loop: {0}")]
    NotALoop(&'static str),

    #[error("{what} supports at most {bound} points, got {actual}")]
    BoundExceeded {
        what: &'static str,
        bound: usize,
        actual: usize,
    },

    #[error("enumeration exceeded cap of {cap}")]
    CapExceeded { cap: usize },

    #[error("invalid cross-section: {0}")]
    InvalidCrossSection(String),

    #[error("measure has non-vanishing one-dimensional marginals")]
    MarginalsNotZero,

    #[error("measure lies outside the unit ball (norm {0})")]
    NormAboveOne(String),

    #[error("weak-loop vector must have at least one non-zero coefficient")]
    AllZero,

    #[error("generator budgets are infeasible: {0}")]
    InfeasibleBudget(String),

    #[error("conformal decomposition stalled; offending vector: {dump}")]
    DecompositionStalled { dump: String },
}

pub type Result<T> = std::result::Result<T, Error>;
