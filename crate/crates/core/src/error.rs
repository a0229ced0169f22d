use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DdaeError {
    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("gcd of two zero polynomials is undefined")]
    ZeroGcd,

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("delay must be positive")]
    NonPositiveDelay,

    #[error("matrix triple is not commutative")]
    NotCommutative,

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("matrix is singular")]
    Singular,

    #[error("matrix triple is irregular: {0}")]
    Irregular(String),

    #[error("characteristic quasipolynomial is identically zero")]
    ZeroQuasiPoly,

    #[error("no strangeness-free form in the given coordinates")]
    NotStrangenessFree,

    #[error("value {t} outside the domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("insufficient lookahead: {0}")]
    Lookahead(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, DdaeError>;
