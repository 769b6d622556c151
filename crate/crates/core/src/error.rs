use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),
    #[error("degenerate decomposition: bottom row of the matrix vanishes")]
    DegenerateDecomposition,
    #[error("invalid label: {0}")]
    InvalidLabel(String),
    #[error("invalid degree {0}")]
    InvalidDegree(i64),
    #[error("basis index {m} out of range for truncation order {n}")]
    IndexOutOfRange { m: usize, n: usize },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("truncation: order {needed} needed for tail {tail:.3e}, limit {limit}")]
    TruncationError {
        needed: usize,
        limit: usize,
        tail: f64,
    },
    #[error("state not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("projection residual {residual:.3e} exceeds {tol:.3e}")]
    ProjectionError { residual: f64, tol: f64 },
    #[error("function has no derivative handle")]
    MissingDerivative,
    #[error("quadrature failed: achieved error {achieved:.3e}, requested {requested:.3e}")]
    QuadratureFailure { achieved: f64, requested: f64 },
    #[error("mother wavelet is not admissible")]
    NotAdmissible,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("singular coefficient: {0}")]
    SingularCoefficient(String),
}

pub type Result<T> = std::result::Result<T, Error>;
