use thiserror::Error;

#[derive(Debug, Error)]
pub enum GhError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid geometry {lx}x{ly}: {reason}")]
    InvalidGeometry { lx: usize, ly: usize, reason: String },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter { name: String, value: String, reason: String },

    #[error("operator is not Hermitian: {0}")]
    NonHermitian(String),

    #[error("logical operator {0} anticommutes with the noise and would be destroyed")]
    LogicalDestroyed(String),

    #[error("operator {0} does not commute with the decoherence channel")]
    NotChannelCompatible(String),

    #[error("state too large: {n} qubits exceeds the limit of {limit}")]
    StateTooLarge { n: usize, limit: usize },

    #[error("{count} decohered links exceeds the cap of {cap}")]
    TooManyKrausBranches { count: usize, cap: usize },

    #[error("eigensolver did not converge: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },

    #[error("no ground state in sector {0}")]
    SectorNotFound(String),

    #[error("not a valid Omega-basis label: {0}")]
    InvalidLabel(String),

    #[error("instance too large for {method}: {size} > {limit}")]
    InstanceTooLarge { method: String, size: usize, limit: usize },

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, GhError>;

pub(crate) fn invalid_param(name: &str, value: impl ToString, reason: &str) -> GhError {
    GhError::InvalidParameter {
        name: name.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}
