use thiserror::Error;

/// Errors produced by the workbench library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Input text could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input parsed but failed a domain check.
    #[error("validation error at line {line}: {message}")]
    Validation { line: usize, message: String },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("malformed path label `{0}`")]
    MalformedPath(String),

    /// A writer already holds the session.
    #[error("conflict: {0}")]
    Conflict(String),

    /// The session is not in a state where the operation applies.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A rule or config references something unknown.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dataset fingerprint mismatch: snapshot has {expected}, session has {found}")]
    Fingerprint { expected: String, found: String },

    #[error("snapshot error: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Delivery(#[from] crate::filter::DeliveryError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
