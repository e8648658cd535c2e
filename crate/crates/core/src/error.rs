use thiserror::Error;

pub type Result<T> = std::result::Result<T, QslError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QslError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NonHermitianInput { defect: f64 },

    #[error("parameter `{name}` = {value} is out of range: {reason}")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("decay rate diverges at t = {t} (denominator {denominator:.3e})")]
    PoleEncountered { t: f64, denominator: f64 },

    #[error("evolved state is not positive semidefinite (minimum eigenvalue {min_eigenvalue:.3e})")]
    PositivityViolation { min_eigenvalue: f64 },

    #[error("probability `{name}` = {value} lies outside [0, 1] beyond rounding")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("state purity {purity} is below the 4x4 minimum of 1/4")]
    DegeneratePurity { purity: f64 },

    #[error("quadrature did not converge: relative change {relative_change:.3e} at {steps} steps")]
    QuadratureNonConvergent { steps: usize, relative_change: f64 },

    #[error("RK4 step too large: halving dt changed the result by {change:.3e}")]
    StepTooLarge { change: f64 },

    #[error("trace drifted by {drift:.3e} during integration")]
    TraceDrift { drift: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}
