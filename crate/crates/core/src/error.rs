use thiserror::Error;

/// Errors raised by the library. Numeric payloads are carried as `f64`
/// regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside the CGF domain at coordinate {coordinate}: {detail}")]
    Domain { coordinate: usize, detail: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("saddle point not found in domain (last residual {residual:e})")]
    SaddleNotInDomain { residual: f64 },

    #[error("degenerate saddle point: Hessian eigenvalue {min_eigenvalue:e} vs largest {max_eigenvalue:e}")]
    DegenerateSaddle { min_eigenvalue: f64, max_eigenvalue: f64 },

    #[error("saddle point iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("tail constant c(n, theta*, x0) is infinite ({0})")]
    InfiniteTailConstant(String),

    #[error("dominating-point condition failed at coordinate {coordinate}: {detail}")]
    DominatingPoint { coordinate: usize, detail: String },

    #[error("unsupported dimension {got} for {what}")]
    UnsupportedDimension { what: &'static str, got: usize },

    #[error("not a tail event: theta* = {theta:e} must be positive")]
    NotTailEvent { theta: f64 },

    #[error("invalid IS density parameters: {0}")]
    Parameter(String),

    #[error("psi overflow at |v| = {norm_v}: exponent real part {exponent:e} exceeds 700")]
    PsiOverflow { norm_v: f64, exponent: f64 },

    #[error("statistics need at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
