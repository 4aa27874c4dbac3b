//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the simulator, the reconstruction and the front end.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of a function,
    /// e.g. a negative Bessel argument or an entropy argument outside [0, 1].
    #[error("domain error in {context}: {message}")]
    Domain {
        /// Name of the function or quantity that rejected the input.
        context: &'static str,
        /// Human-readable description of the violated constraint.
        message: String,
    },

    /// A reconstruction problem does not determine its unknowns, e.g. a
    /// tomography projector set that does not span the state space.
    #[error("ill-posed problem: {0}")]
    IllPosed(String),

    /// Invalid run configuration or command-line usage.
    #[error("configuration error: {0}")]
    Config(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A model evaluation failed at runtime, e.g. an optimizer that could
    /// not produce a finite objective.
    #[error("model error: {0}")]
    Model(String),
}

impl Error {
    /// Convenience constructor for [`Error::Domain`].
    pub fn domain(context: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            context,
            message: message.into(),
        }
    }
}
