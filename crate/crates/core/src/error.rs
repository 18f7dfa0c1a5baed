use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator dimension must be at least 1")]
    EmptyDimension,

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("eigensolver did not converge (reconstruction residual {residual:.3e})")]
    EigenNonConvergence { residual: f64 },

    #[error("operator is not positive semi-definite: eigenvalue {min_eigenvalue:.6e} below -{tol:.1e}")]
    NotPsd { min_eigenvalue: f64, tol: f64 },

    #[error("symmetric matrix is not positive definite: minimum eigenvalue {min_eigenvalue:.6e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("domination violated: difference has eigenvalue {min_eigenvalue:.6e}")]
    DominationViolated { min_eigenvalue: f64 },

    #[error("invalid ensemble at index {index}: {reason}")]
    InvalidEnsemble { index: usize, reason: String },

    #[error("invalid ensemble: {reason}")]
    InvalidEnsembleGlobal { reason: String },

    #[error("outcome cell is empty")]
    EmptyCell,

    #[error("invalid partition: {reason}")]
    InvalidPartition { reason: String },

    #[error("grid of {requested} points exceeds the cap of {cap}")]
    GridTooLarge { requested: usize, cap: usize },

    #[error("Fock truncation loss {loss:.3e} exceeds {tol:.1e} at point index {point_index}")]
    TruncationLoss {
        loss: f64,
        tol: f64,
        point_index: usize,
    },

    #[error("score value {value} outside [0, 1]")]
    ScoreOutOfRange { value: f64 },

    #[error(
        "score matrix is not positive semi-definite on this grid: \
         minimum eigenvalue {min_eigenvalue:.6e} below -{tol:.1e}"
    )]
    ScoreNotPsd { min_eigenvalue: f64, tol: f64 },

    #[error("quadrature under-covers the factor support: tail mass bound {tail_bound:.3e} > {limit:.1e}")]
    QuadratureCoverage { tail_bound: f64, limit: f64 },

    #[error("operation supports parameter dimension up to {max}, got {dim}")]
    UnsupportedParamDim { dim: usize, max: usize },

    #[error("POVM cells must be singletons covering every ensemble point")]
    NonSingletonCells,

    #[error("t values must be strictly positive and strictly decreasing, got {value}")]
    InvalidTSequence { value: f64 },

    #[error("random POVM normalizer stayed singular after {attempts} attempts")]
    SingularNormalizer { attempts: usize },

    #[error("length mismatch: {left} values for {right} cells")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
