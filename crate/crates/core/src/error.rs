use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {requested} exceeds the {limit}-dimension {generator} table")]
    DimensionExceedsTable {
        generator: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("index range [{offset}, {offset} + {count}) overflows the 2^31 Sobol' index limit")]
    IndexOverflow { offset: u64, count: u64 },

    #[error("invalid point set: {0}")]
    InvalidPointSet(String),

    #[error("expected scramble kind {expected}, got {got}")]
    WrongScrambleKind {
        expected: &'static str,
        got: &'static str,
    },

    #[error("digit depth {0} is outside [1, 53]")]
    DigitDepth(u32),

    #[error("exact discrepancy needs {work:.3e} grid evaluations (limit {limit:.0e}); use the lower-bound estimator")]
    InstanceTooLarge { work: f64, limit: f64 },

    #[error("point count mismatch: expected {expected}, got {got}")]
    PointCountMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("kernel bandwidth must be positive and finite, got {0}")]
    NonPositiveSigma(f64),

    #[error("Cholesky factorization failed: matrix is not numerically positive definite")]
    Factorization,

    #[error("solver residual {residual:.3e} exceeds tolerance {tolerance:.0e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures caused by the numbers rather than the inputs' shape,
    /// which the CLI reports with a distinct exit code.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Factorization | Error::Residual { .. } | Error::InstanceTooLarge { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
