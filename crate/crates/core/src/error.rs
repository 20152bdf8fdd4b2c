use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input parameter is outside its allowed domain.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// A site index does not address a site of the chain.
    #[error("site index {index} out of range for a chain of {n_sites} sites")]
    SiteOutOfRange { index: usize, n_sites: usize },

    /// A state would leave the truncated excitation basis.
    #[error("state needs {needed} excitations but the basis is truncated at {cap}")]
    Capacity { needed: usize, cap: usize },

    /// Two objects were built over different bases.
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    /// The eigensolver (or another numerical kernel) failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An input violates a mathematical invariant beyond tolerance.
    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
