use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{what} unsupported: {reason}")]
    Unsupported { what: String, reason: String },
    #[error("did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { field, reason: reason.into() }
}

pub(crate) fn unsupported(what: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Unsupported { what: what.into(), reason: reason.into() }
}
