use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a structural invariant (non-Hermitian, wrong shape, ...).
    #[error("structural error: {0}")]
    Structural(String),
    /// Input lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Adaptive quadrature did not reach its tolerance.
    #[error(
        "quadrature did not converge: estimate {estimate:e}, error estimate {error:e} after {evaluations} evaluations"
    )]
    NoConvergence {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },
    /// A matrix that must be inverted is numerically singular.
    #[error("singular matrix: condition estimate {condition:e}")]
    Singular { condition: f64 },
    /// The deterministic-spectrum kernel needs pairwise distinct radial values.
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    /// Invalid user configuration, naming the offending field.
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },
    /// Internal consistency check failed (e.g. branching weights not summing to one).
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
