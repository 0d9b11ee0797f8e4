use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// The variant names double as the machine-readable `error` field of CLI
/// error objects (see [`Error::kind`]).
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("angle {angle} is outside the open interval (0, {upper})")]
    InvalidAngle { angle: f64, upper: f64 },

    #[error("invalid region order n = {0}; n must be at least 1")]
    InvalidOrder(usize),

    #[error("ray truncation radius must be positive, got {0}")]
    InvalidTruncation(f64),

    #[error("quadrature did not converge within {budget} nodes (used {nodes})")]
    NoConvergence { nodes: usize, budget: usize },

    #[error("resolvent is numerically singular at λ = {lambda}")]
    SingularResolvent { lambda: Complex64 },

    #[error("function has a pole at z = {z}")]
    PoleHit { z: Complex64 },

    #[error("function is unbounded on the region: {0}")]
    Unbounded(String),

    #[error("operator is not classifiable: {0}")]
    NotClassifiable(String),

    #[error("decay certificate rejected: {0}")]
    CertificateRejected(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// Short stable identifier of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidAngle { .. } => "InvalidAngle",
            Error::InvalidOrder(_) => "InvalidOrder",
            Error::InvalidTruncation(_) => "InvalidTruncation",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::SingularResolvent { .. } => "SingularResolvent",
            Error::PoleHit { .. } => "PoleHit",
            Error::Unbounded(_) => "Unbounded",
            Error::NotClassifiable(_) => "NotClassifiable",
            Error::CertificateRejected(_) => "CertificateRejected",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::DomainError(_) => "DomainError",
            Error::Precondition(_) => "Precondition",
        }
    }
}
