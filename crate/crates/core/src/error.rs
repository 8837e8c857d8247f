use thiserror::Error;

/// Crate-wide error type. Variants map onto the CLI exit codes:
/// parse/precondition problems are "input errors" (exit 2), resource
/// ceilings are exit 3, everything else surfaces as exit 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {0} out of range (graph has {1} vertices)")]
    VertexOutOfRange(usize, usize),

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("edge weight must be strictly positive at edge ({0}, {1})")]
    NonPositiveWeight(usize, usize),

    #[error("edge ({0}, {1}) not present in graph")]
    EdgeNotFound(usize, usize),

    #[error("graph is disconnected: vertex {0} unreachable from vertex {1}")]
    Disconnected(usize, usize),

    #[error("operation requires unit edge weights")]
    NonUnitWeights,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("resource ceiling exceeded: {0}")]
    ResourceCeiling(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("empty tree decomposition")]
    EmptyDecomposition,

    #[error("tree decomposition is not valid: {0}")]
    InvalidDecomposition(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
