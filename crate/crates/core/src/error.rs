use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("singular parametrization: e-values {i} and {j} coincide")]
    SingularParametrization { i: usize, j: usize },

    #[error("operator is stationary under the evolution: {0}")]
    StationaryOperator(String),

    #[error("{0} failed to converge")]
    NoConvergence(&'static str),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn stationary(msg: impl Into<String>) -> Self {
        Error::StationaryOperator(msg.into())
    }
}
