use thiserror::Error;

/// Errors produced by the allocation solvers and their inputs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested common rate is at or above the user's asymptotic rate cap
    /// `gamma * tau0 / ln 2`, so no finite slot length attains it.
    #[error("no root: rate {rate} is not below the cap {cap}")]
    NoRoot { rate: f64, cap: f64 },

    /// An iterative search hit its iteration cap. `best` is the last usable iterate.
    #[error("{solver} did not converge after {iterations} iterations (best iterate {best})")]
    Convergence {
        solver: &'static str,
        iterations: usize,
        best: f64,
    },

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
