use thiserror::Error;

use crate::multi_index::MultiIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A Fock vector component lies outside the hard-core (occupation ≤ 1) subspace.
    #[error("state has support outside the hard-core subspace at {0}")]
    NotHardCore(MultiIndex),

    #[error("symbol is not real (conjugate-invariant); defect {0:e}")]
    NonReal(f64),

    #[error("quadrature cross-check failed: {0}")]
    QuadratureMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable code, used as the CLI error prefix.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "E_DIMENSION",
            Error::NotHardCore(_) => "E_DOMAIN",
            Error::NonReal(_) => "E_NON_REAL",
            Error::QuadratureMismatch(_) => "E_QUADRATURE",
            Error::InvalidArgument(_) => "E_INVALID",
        }
    }

    pub(crate) fn dims(what: &str, left: usize, right: usize) -> Self {
        Error::Dimension(format!("{what}: {left} vs {right}"))
    }
}
