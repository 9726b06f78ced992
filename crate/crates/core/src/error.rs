use thiserror::Error;

/// Errors shared by the state algebra, criteria, and protocol modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A matrix expected to be a density operator does not have unit trace.
    #[error("matrix trace {0} deviates from 1 beyond tolerance")]
    NonUnitTrace(f64),

    /// A matrix expected to be Hermitian is not, within tolerance.
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    /// A state expected to be positive semidefinite has a negative eigenvalue.
    #[error("state is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    /// A parameter lies outside its admissible window.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A measurement sharpness outside the admissible interval.
    #[error("sharpness {0} outside the admissible interval")]
    InvalidSharpness(f64),

    /// Two routes that must agree (analytic vs simulated, or a numeric
    /// cross-check) have diverged. Always a bug, never a usage error.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    /// The bisection search exhausted its range without reaching the
    /// requested number of detections.
    #[error("no theta >= {floor:e} yields {requested} detections (best achieved: {best_count})")]
    ThetaNotFound {
        requested: usize,
        best_count: usize,
        floor: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
