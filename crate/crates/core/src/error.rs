use thiserror::Error;

/// Errors raised by the model, operator, quadrature and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A point lies outside the region an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solver stopped before reaching its tolerance.
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// A numerical object came out with the wrong qualitative shape
    /// (indefinite Hessian, non-finite value, ...).
    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    /// Lattice truncation would need more terms than the policy allows.
    #[error("truncation needs {needed} terms, cap is {max_terms}")]
    Resource { needed: usize, max_terms: usize },

    /// A required input (typically a monomial norm) is not available.
    #[error("missing dependency: {0}")]
    Dependency(String),

    /// A monomial norm integral did not stabilise under window growth.
    #[error("norm integral for alpha = {alpha:?} does not converge: {detail}")]
    Divergence { alpha: Vec<i64>, detail: String },

    /// Malformed expression text.
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    /// Bad user input: unknown model name, malformed config, bad flag combination.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::InvalidInput(_) | Error::Json(_))
    }

    /// Stable machine-readable tag for error objects emitted by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Convergence { .. } => "convergence",
            Error::NumericalInstability(_) => "numerical-instability",
            Error::Resource { .. } => "resource",
            Error::Dependency(_) => "dependency",
            Error::Divergence { .. } => "divergence",
            Error::Parse { .. } => "parse",
            Error::InvalidInput(_) => "invalid-input",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
