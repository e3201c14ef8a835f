use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the solvers.
///
/// Variants split into two families: parameter/validation problems that a
/// caller can fix by changing inputs, and numerical failures that happen
/// after the inputs were accepted. [`Error::is_validation`] tells them apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar argument lies outside the set where the formula is defined.
    #[error("domain error: {name} = {value} violates {constraint}")]
    Domain {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// A parameter set violates one of its invariants.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The grid or problem cannot be discretized as requested.
    #[error("assembly error: {0}")]
    Assembly(String),

    /// A precondition on a run input (initial point, counts) is violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The requested combination is deliberately not supported.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Quadrature, factorization or a post-solve check failed.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Numerical(_))
    }

    pub(crate) fn domain(name: &'static str, value: f64, constraint: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            constraint,
        }
    }
}
