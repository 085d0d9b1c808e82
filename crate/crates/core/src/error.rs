//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Result`] with [`Error`].
//! Variants are coarse-grained by failure class so callers (CLI, FFI) can map
//! them to exit/status codes without string matching.

use thiserror::Error;

/// Errors produced by the exact-combinatorics, prediction, and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is malformed or out of the documented domain
    /// (bad partition data, mismatched lengths, negative variance, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A request exceeded a size cap that exists to keep exact enumeration
    /// tractable (factorial/Catalan growth).
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// An exact linear system has no unique solution (e.g. a Gram matrix of
    /// trace characters evaluated at a dimension where it degenerates).
    #[error("singular system: {0}")]
    SingularSystem(String),

    /// A moment or cumulant needed by a formula is not available from the
    /// supplied data table.
    #[error("missing moment: {0}")]
    MissingMoment(String),

    /// Parsing a word, pattern, or configuration string failed.
    #[error("parse error: {0}")]
    Parse(String),

    /// The operation is recognised but deliberately not implemented
    /// (documented as out of scope).
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Configuration file / experiment setup problems.
    #[error("config error: {0}")]
    Config(String),

    /// Underlying I/O failure (file read/write, serialization sink).
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure for configs and reports.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used across the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Shorthand constructor for [`Error::InvalidArgument`].
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Shorthand constructor for [`Error::Parse`].
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
