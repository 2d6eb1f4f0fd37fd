use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The sequence pair breaks 2·a0(n) + a1(n) = 1.
    #[error("sequence constraint violated: 2·a0 + a1 = {value} (expected 1)")]
    Constraint { value: String },

    /// A tail sum left [0, 1] while a fractional Bézier exponent was requested.
    #[error("Bézier base J[{index}] = {value:e} is outside [0, 1]; fractional exponent {mu} is undefined")]
    BezierBase { index: usize, value: f64, mu: f64 },

    #[error("exact engine cap exceeded: {what} = {value} > {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("moment table is missing {0}")]
    MissingEntry(String),

    #[error("function `{function}` provides no derivative of order {order}")]
    MissingDerivative { function: String, order: usize },

    #[error("not enough usable rows for a fit: {0}")]
    InsufficientData(String),

    #[error("theorem `{theorem}` does not apply to operator kind `{kind}`")]
    InvalidPairing { theorem: String, kind: String },

    #[error("zero polynomial has no leading coefficient")]
    ZeroPolynomial,

    #[error("parse error: {0}")]
    Parse(String),
}
