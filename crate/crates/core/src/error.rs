use thiserror::Error;

pub type Result<T> = std::result::Result<T, HetError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HetError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument {name} = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("interval bounds out of order: x0 = {x0} > x1 = {x1}")]
    ArgumentOrder { x0: f64, x1: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("series diverges: {0}")]
    Convergence(String),

    #[error("series did not reach requested precision after {terms} terms (partial value {partial})")]
    Precision { terms: usize, partial: f64 },

    #[error("cancellation destroyed the result: {0}")]
    Cancellation(String),

    #[error("quadrature grid needs {needed} density evaluations, limit {limit}")]
    GridResolution { needed: f64, limit: f64 },

    #[error("distance matrix is constant; cannot rescale")]
    DegenerateDistance,

    #[error("quadratic entropy {q1} too close to 1; numbers equivalent is singular")]
    Singularity { q1: f64 },

    #[error("index undefined: {0}")]
    UndefinedIndex(String),

    #[error("order q = {0} is undefined for this quantity")]
    UndefinedOrder(String),

    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("pooled covariance is degenerate (pivot {pivot} at row {row})")]
    DegeneratePool { row: usize, pivot: f64 },

    #[error("unsupported latent dimension {0} (at most 3)")]
    UnsupportedDimension(usize),
}

impl HetError {
    /// True for failures of a numerical procedure rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            HetError::Convergence(_)
                | HetError::Precision { .. }
                | HetError::Cancellation(_)
                | HetError::GridResolution { .. }
                | HetError::Singularity { .. }
                | HetError::UndefinedIndex(_)
                | HetError::DegeneratePool { .. }
        )
    }
}
