use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The input lies outside the mathematical domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// A floating-point result overflowed.
    #[error("range error: {0}")]
    Range(String),

    #[error("enumeration exceeds the limit of {limit} occupation maps")]
    EnumerationTooLarge { limit: usize },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error(
        "moment target <E^{order}> = {target} is outside the attainable open interval ({lower}, {upper})"
    )]
    Infeasible {
        order: usize,
        target: f64,
        lower: f64,
        upper: f64,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Domain(_) => "domain",
            Error::Range(_) => "range",
            Error::EnumerationTooLarge { .. } => "enumeration_too_large",
            Error::NotConverged { .. } => "not_converged",
            Error::Infeasible { .. } => "infeasible",
        }
    }
}
