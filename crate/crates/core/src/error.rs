use thiserror::Error;

/// Errors raised by the state calculus, the measurement dynamics and the
/// canned scenarios.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("subsystem sets overlap: {0}")]
    Disjointness(String),

    #[error("unknown or invalid subsystem label: {0}")]
    Label(String),

    #[error("not a subset: {0}")]
    Subset(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("operator is not unitary (max deviation {0:.3e})")]
    Unitarity(f64),

    #[error("partition is not a disjoint cover of the space: {0}")]
    Partition(String),

    #[error("reference system is not declared isolated")]
    Isolation,

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("measurement branch has zero weight: {0}")]
    DegenerateBranch(String),

    #[error("phase undefined: {0}")]
    PhaseUndefined(String),

    #[error("normalization violated: {0}")]
    Normalization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
