use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("solver did not converge: {message} (last residual {residual:e})")]
    Solver { message: String, residual: f64 },

    /// The cluster is malformed independently of any axiom (dangling
    /// references, identical labels on both sides of an interface, ...).
    #[error("structural error: {0}")]
    Structural(String),

    #[error("quadrature did not converge: last two estimates {last:e} and {previous:e}")]
    Convergence { last: f64, previous: f64 },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("degenerate constraint system: {0}")]
    DegenerateConstraint(String),

    #[error("perturbation rejected: {0}")]
    Perturbation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn structural(msg: impl Into<String>) -> Error {
    Error::Structural(msg.into())
}
