use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric: max |a_ij - a_ji| = {asymmetry:e}")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("malformed matrix: {0}")]
    Shape(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("Jacobi iteration did not converge for {dim}x{dim} matrix {digest} after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence {
        dim: usize,
        sweeps: usize,
        residual: f64,
        digest: String,
    },

    #[error("{value} lies outside the domain {domain} of `{function}`")]
    Domain {
        function: String,
        value: f64,
        domain: String,
    },

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("function `{0}` has no derivative")]
    MissingDerivative(String),

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
