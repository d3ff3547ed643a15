use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix must be square, got {nrows}x{ncols}")]
    NotSquare { nrows: usize, ncols: usize },

    #[error("result dimensions overflow usize: {0}")]
    Capacity(String),

    #[error("CG breakdown at iteration {iteration}: direction curvature {curvature:.3e} is not positive")]
    CgBreakdown { iteration: usize, curvature: f64 },

    #[error("power iteration did not converge in {max_iter} iterations (last estimate {estimate:.6e})")]
    PowerIterationStalled { max_iter: usize, estimate: f64 },

    #[error("inner solve failed at outer step {step}")]
    InnerSolve {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("singular system: no usable pivot at column {col}")]
    Singular { col: usize },

    #[error("skew part is zero (sigma_max = 0); use hss_alpha with omega = 0 instead")]
    DegenerateSkewPart,

    #[error("GPR fit failed: {0}")]
    GprFit(String),

    #[error("GPR Gram matrix is not positive definite: {0}")]
    GramNotPositiveDefinite(String),

    #[error("no grid point converged during traversal")]
    TraversalFailed,

    #[error("traversal failed at n = {n}")]
    TrainingSet {
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
