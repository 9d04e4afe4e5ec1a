use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("every input vector is zero")]
    AllZeroInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrices do not commute (max residual {residual:e})")]
    NotCommuting { residual: f64 },
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("{0} is not squarefree")]
    NotSquarefree(u64),
    #[error("radicand {0} appears more than once")]
    Duplicate(u64),
    #[error("radicand {0} must be at least 2")]
    RadicandTooSmall(u64),
    #[error("no trace found up to search bound {0}")]
    SearchBoundExceeded(u32),
    #[error("grid covers differ in window or cell size")]
    IncompatibleGrids,
    #[error("no nontrivial canonical subspace: {0}")]
    NoNontrivialCanonical(String),
    #[error("{p} and {q} are not coprime")]
    NotCoprime { p: u64, q: u64 },
    #[error("rotation parameter is rational")]
    RationalTheta,
    #[error("magnitude overflow during orbit enumeration")]
    Overflow,
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
