use alloc::string::String;

/// Errors raised by the model core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("matrix is not positive definite (pivot {pivot} = {value})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("covariance factorization failed even with jitter {jitter:e}")]
    FactorizationFailed { jitter: f64 },

    #[error("matrix has a negative eigenvalue {0:e}; no real factorization exists")]
    NegativeEigenvalue(f64),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("numerical failure at sweep {sweep}: {source}")]
    Sweep {
        sweep: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures of the numerical kind (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NotPositiveDefinite { .. }
            | Error::FactorizationFailed { .. }
            | Error::NegativeEigenvalue(_)
            | Error::NonFinite(_) => true,
            Error::Sweep { source, .. } => source.is_numerical(),
            Error::InvalidInput(_) | Error::OutOfRange(_) => false,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
