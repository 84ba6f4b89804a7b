use thiserror::Error;

/// Errors produced by the library.
///
/// `Config` covers invalid setup (bad grid sizes, unsupported exponents,
/// mismatched field shapes); `Domain` covers mathematically inadmissible
/// requests (negative-order multiplier on a field with mean, degenerate
/// relaxation time); `Numerical` covers runtime failures such as detected
/// blow-up; `Format` covers serialized-field decoding problems.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}
