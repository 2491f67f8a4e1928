use thiserror::Error;

/// Errors raised by the library.
///
/// The variants line up with the CLI exit codes: `Domain`, `Syntax`, `Model`
/// and `Json` are input errors, `Resource` is a blown state cap.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Domain(String),

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("invalid automaton: {0}")]
    Model(String),

    #[error("{what} exceeded the state cap of {cap}")]
    Resource { what: &'static str, cap: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
