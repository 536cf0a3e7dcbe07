use thiserror::Error;

/// Errors raised by calibration, inversion and codec operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{quantity} = {value} is outside the valid domain ({requirement})")]
    Domain {
        quantity: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("matrix is singular (zero pivot in column {column})")]
    Singular { column: usize },

    #[error("insufficient data: need at least {needed} {what}, got {got}")]
    InsufficientData {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("insufficient samples at distance {distance} m: need at least 2, got {got}")]
    InsufficientSamples { distance: f64, got: usize },

    #[error("degenerate abscissa: all x values are equal")]
    DegenerateAbscissa,

    #[error("insufficient degrees of freedom: {len} observations for {params} parameters")]
    InsufficientDof { len: usize, params: usize },

    #[error("correlation undefined: column `{column}` is constant")]
    UndefinedCorrelation { column: &'static str },

    #[error("model is not invertible: path-loss exponent {eta} must be > 0")]
    NonInvertible { eta: f64 },

    #[error("no coverage: {0}")]
    NoCoverage(String),

    #[error("dataset `{name}` not found (available: {})", available.join(", "))]
    NotFound {
        name: String,
        available: Vec<String>,
    },

    #[error("format error at line {line}: {message}")]
    Format { line: u64, message: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: usize,
        message: String,
    },

    #[error("validation error at line {line}: {message}")]
    Validation { line: u64, message: String },

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
}

impl Error {
    /// True for failures of the numerical machinery itself, as opposed to
    /// bad or insufficient input data.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. } | Error::DegenerateAbscissa | Error::UndefinedCorrelation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_finite(quantity: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidInput(format!(
            "{quantity} must be finite, got {value}"
        )))
    }
}

pub(crate) fn require_positive(quantity: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain {
            quantity,
            value,
            requirement: "must be > 0",
        })
    }
}
