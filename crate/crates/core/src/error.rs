use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IfeError {
    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("invalid interface configuration: {0}")]
    InvalidInterface(String),

    #[error("unsupported quadrature order {0} (supported: 1..=32)")]
    UnsupportedOrder(usize),

    #[error("breakpoint {breakpoint} lies outside the interval [{lo}, {hi}]")]
    InvalidBreakpoint { breakpoint: f64, lo: f64, hi: f64 },

    #[error("three-term recurrence broke down at degree {degree}: {detail}")]
    RecurrenceBreakdown { degree: usize, detail: String },

    #[error("polynomial degree {requested} exceeds the supported maximum {max}")]
    DegreeTooHigh { requested: usize, max: usize },

    #[error("argument {value} outside the admissible domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("root count violation: expected {expected} interior roots, found {found}")]
    RootCountViolation { expected: usize, found: usize },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("singular system: pivot {pivot:e} at row {row}")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("matrix is not positive definite (failed at row {0})")]
    NotPositiveDefinite(usize),

    #[error("insufficient data for regression: {usable} usable points, need at least 3")]
    InsufficientData { usable: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, IfeError>;
