use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration that violates one of its invariants.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "quadrature did not converge within {subdivisions} subdivisions \
         (estimate {estimate:e}, error bound {error:e})"
    )]
    NonConvergence { subdivisions: usize, estimate: f64, error: f64 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Two evaluation routes of the same quantity disagree.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("out of range: {0}")]
    Range(String),

    /// Request beyond the desk-scale limits of an exhaustive procedure.
    #[error("scale limit exceeded: {0}")]
    Scale(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
