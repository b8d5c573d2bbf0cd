//! Error type shared by all core modules.

use thiserror::Error;

/// Errors from the core perception pipeline.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A caller-supplied value violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A text artifact could not be parsed; reports the offending line.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// An underlying filesystem operation failed.
    #[error("i/o error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// No accelerometer sample survived the magnitude gate, so the gravity
    /// direction is unknown.
    #[error("gravity estimation failed: no usable accelerometer samples")]
    GravityUnobservable,

    /// Plane inliers were collinear after projection; no polygon exists.
    #[error("degenerate hull: projected inliers are collinear")]
    DegenerateHull,

    /// A cluster had no measurable in-plane spread, so box axes and grasp
    /// points are undefined.
    #[error("degenerate cluster: no in-plane spread")]
    DegenerateCluster,
}

impl CoreError {
    /// Convenience constructor for parse failures.
    pub fn parse(path: &std::path::Path, line: usize, message: impl Into<String>) -> Self {
        CoreError::Parse {
            path: path.display().to_string(),
            line,
            message: message.into(),
        }
    }

    /// Convenience constructor for I/O failures.
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CoreError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
