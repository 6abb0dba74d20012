use thiserror::Error;

/// Errors raised by the analytic, constructive and simulation layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid topology: {0}")]
    Topology(String),

    #[error("invalid demand: {0}")]
    Demand(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no points")]
    NoPoints,

    #[error("infeasible halfspace system")]
    Infeasible,

    #[error("bound inapplicable: {0}")]
    Inapplicable(String),

    #[error("use trivial scheme: N <= K_mbs")]
    UseTrivialScheme,

    #[error("sidelink scheme requires t >= 1")]
    SidelinkNeedsCaching,

    #[error("partition space too large: H = {h} exceeds cap {cap}")]
    PartitionSpaceTooLarge { h: usize, cap: usize },

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("degenerate field sampling after {0} retries")]
    DegenerateSampling(usize),

    #[error("node {node} failed to decode: {missing}")]
    DecodeFailure { node: String, missing: String },

    #[error("encoder infeasible: {0}")]
    EncoderInfeasible(String),

    #[error("library not fully stored across SBSs")]
    LibraryCoverage,

    #[error("demand space too large: {size} vectors exceeds cap {cap}; use canonical demand enumeration")]
    DemandSpaceTooLarge { size: u128, cap: u128 },

    /// Two independent computations of the same quantity disagree.
    #[error("verification failed: {0}")]
    Mismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
