use thiserror::Error;

/// Errors raised by the numerical core and the campaign harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix rows are ragged (row {row} has {found} entries, expected {expected})")]
    Ragged { row: usize, expected: usize, found: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid gauge: {0}")]
    InvalidGauge(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("atom budget exceeded: {required} atoms > budget {budget}")]
    AtomBudget { required: usize, budget: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used in report records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } | Error::Ragged { .. } | Error::NonFinite { .. } => "malformed_matrix",
            Error::DimMismatch { .. } => "dim_mismatch",
            Error::NotHermitian { .. } | Error::NotPsd { .. } => "precondition_violation",
            Error::Numerical(_) => "numerical_error",
            Error::InvalidGauge(_) => "invalid_gauge",
            Error::InvalidField(_) => "invalid_field",
            Error::Hypothesis(_) => "hypothesis_violation",
            Error::AtomBudget { .. } => "atom_budget_exceeded",
            Error::Degenerate(_) => "degenerate",
            Error::InvalidParams(_) => "invalid_params",
            Error::Config(_) => "config_error",
            Error::Schema(_) => "schema_mismatch",
            Error::Io(_) => "io_error",
            Error::Json(_) => "json_error",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
