use alloc::string::String;

/// Failures reported by the numerical operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("index {index} out of range 1..=4")]
    AxisOutOfRange { index: usize },
    #[error("wedge indices must differ (got {0}, {0})")]
    DegenerateWedge(usize),
    #[error("lattice needs an even N >= 4, got {0}")]
    LatticeTooSmall(usize),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unsupported form degree {0} for this operation")]
    Degree(u8),
    #[error("chirality mismatch: expected {expected}, got {got}")]
    Chirality { expected: &'static str, got: &'static str },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("operator is not symmetric (defect {defect:e})")]
    NotSymmetric { defect: f64 },
    #[error("line search step fell below {min_step:e} at iteration {iteration}")]
    StepUnderflow { iteration: usize, min_step: f64 },
    #[error("zero field passed where a nonzero one is required")]
    ZeroField,
    #[error("fixed step of size {step:e} increased the energy at iteration {iteration}")]
    EnergyIncrease { iteration: usize, step: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
