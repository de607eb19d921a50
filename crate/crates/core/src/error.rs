use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GinvError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("subspaces are not complementary: {0}")]
    NonComplementarySubspaces(String),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("block constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("not an inner inverse: relative residual {residual:.3e} of TXT = T exceeds tolerance")]
    InvalidInnerInverse { residual: f64 },

    #[error("exponent must be at least 2, got {0}")]
    InvalidExponent(usize),

    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),

    #[error("theorem `{id}` expects {expected}")]
    ArityMismatch { id: String, expected: String },

    #[error("invalid instance spec: {0}")]
    InvalidSpec(String),

    #[error("matrix power norms overflowed the cap {cap:.1e}")]
    Overflow { cap: f64 },

    #[error("tolerance `{name}` must be finite and strictly positive, got {value}")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("malformed matrix document: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GinvError>;
