use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain of the function; the message names the constraint.
    #[error("domain error: require {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("rank deficient: row {row} is linearly dependent on the preceding rows")]
    RankDeficient { row: usize },

    #[error("subspaces are not nested: level {level} is not contained in level {next}")]
    NotNested { level: usize, next: usize },

    /// The width-confidence level γ is too small for the requested tuning.
    #[error("infeasible: gamma = {gamma} is below the minimal feasible gamma {min_gamma}")]
    Infeasible { gamma: f64, min_gamma: f64 },

    #[error("root bracket failure: {0}")]
    Bracket(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
