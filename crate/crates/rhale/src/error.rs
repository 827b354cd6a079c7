//! Error types shared across the crate.

use thiserror::Error;

/// All failure modes surfaced by the library.
///
/// The CLI maps these onto exit codes: invalid input and I/O problems exit 2,
/// [`Error::Infeasible`] exits 3, anything unexpected exits 4.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (dimension mismatch, out-of-range
    /// value, non-increasing partition, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested computation has no feasible solution under the given
    /// constraints (e.g. fewer data points than the minimum per bin).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The operation needs a capability the inputs do not provide
    /// (e.g. an analytic gradient, or a ground truth that is not defined).
    #[error("unsupported: {0}")]
    Capability(String),

    /// A bin ended up empty where the operation requires at least one point.
    #[error("empty bin {bin}: {context}")]
    EmptyBin { bin: usize, context: String },

    /// A bin has too few points for the requested statistic
    /// (standard deviation needs at least two).
    #[error("degenerate bin {bin} ({count} point(s)): {context}")]
    DegenerateBin {
        bin: usize,
        count: usize,
        context: String,
    },

    /// The model produced a non-finite output.
    #[error("model returned a non-finite value at row {row}")]
    Model { row: usize },

    /// File reading/writing failed.
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// CSV parsing failed.
    #[error("CSV error in {path}: {message}")]
    Csv { path: String, message: String },

    /// JSON (de)serialization failed.
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
