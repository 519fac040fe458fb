use thiserror::Error;

/// Errors raised while building or evaluating homogeneous presentations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("Jacobi identity violated: residual {residual:.3e}")]
    JacobiViolation { residual: f64 },

    #[error("action is not by derivations: defect {defect:.3e}")]
    NotDerivation { defect: f64 },

    #[error("basis vectors are linearly dependent (smallest singular value {sigma_min:.3e})")]
    DependentBasis { sigma_min: f64 },

    #[error("isotropy is not a subalgebra: residual {residual:.3e}")]
    NotSubalgebra { residual: f64 },

    #[error("background not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    BackgroundNotPositive { min_eigenvalue: f64 },

    #[error("background not invariant: skewness defect {defect:.3e}")]
    BackgroundNotInvariant { defect: f64 },

    #[error("decomposition not reductive: residual {residual:.3e}")]
    NotReductive { residual: f64 },

    #[error("presentation not almost-effective: kernel of dimension {}", kernel.len())]
    NotAlmostEffective { kernel: Vec<Vec<f64>> },

    #[error("metric degenerate: smallest eigenvalue {min_eigenvalue:.3e}")]
    DegenerateMetric { min_eigenvalue: f64 },

    #[error("subspace is not an ideal: residual {residual:.3e}")]
    NotAnIdeal { residual: f64 },

    #[error("ideal has no semisimple part (derived series reaches zero after {steps} steps)")]
    NoSemisimplePart { steps: usize },

    #[error("subspace is not compact semisimple (Killing eigenvalues {eigenvalues:?})")]
    NotCompactSemisimple { eigenvalues: Vec<f64> },

    #[error("fiber complement is zero: almost-effectiveness violated")]
    EmptyFiber,

    #[error("fiber complement leaves the reductive complement: residual {residual:.3e}")]
    FiberNotInComplement { residual: f64 },

    #[error("positive Ricci bound violated: ric {ric:.6e} < bound {bound:.6e}")]
    BoundViolated { ric: f64, bound: f64 },

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("invalid flow options: {0}")]
    InvalidOptions(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed document: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
