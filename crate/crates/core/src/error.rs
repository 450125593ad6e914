use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "series did not converge after {terms} terms (partial sum {partial_sum:e}, last term {last_term:e})"
    )]
    NonConvergence {
        terms: usize,
        partial_sum: f64,
        last_term: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A physical invariant was violated; points at an upstream bug.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
