use thiserror::Error;

/// Errors raised by the tensor engine and the checks built on top of it.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum GeometryError {
    #[error("variance mismatch: {0}")]
    Variance(String),

    #[error("slot {slot} out of range for rank {rank}")]
    Index { slot: usize, rank: usize },

    #[error("singular metric (pivot {pivot:.3e} against scale {scale:.3e})")]
    SingularMetric { pivot: f64, scale: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("backend error: {0}")]
    Backend(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("paraholomorphic base failed validation: {0}")]
    PhpcrValidation(String),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("degenerate fit basis: {0}")]
    FitDegenerate(String),

    #[error("transformed metric is not positive definite: {0}")]
    MetricSignature(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid model document: {0}")]
    Model(String),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
