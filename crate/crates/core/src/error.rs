use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model parameter violates one of the standing assumptions.
    /// `constraint` is the violated inequality, written out.
    #[error("violated constraint `{constraint}`: {detail}")]
    InvalidParams {
        constraint: &'static str,
        detail: String,
    },

    #[error("entanglement parameter must be finite and non-negative, got {0}")]
    InvalidGamma(f64),

    #[error("raw correlated quantities diverge at infinite entanglement; use normalized mode")]
    DivergentRawCorrelation,

    #[error("finite-entanglement payoffs are undefined at infinite gamma; use the maximally correlated game")]
    InfiniteGamma,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("objective is not finite at grid point {0}")]
    NonFiniteObjective(f64),
}

impl Error {
    pub(crate) fn params(constraint: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParams {
            constraint,
            detail: detail.into(),
        }
    }
}
