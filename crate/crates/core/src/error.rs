use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulation frequency {omega0} is within the resonance guard; use the resonant closed form")]
    ResonanceSingularity { omega0: f64 },

    #[error("quadrature did not reach tolerance {tol:e} within {evals} evaluations (error estimate {estimate:e})")]
    QuadratureFailure { tol: f64, estimate: f64, evals: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coupling profile is not defined at tau = {tau}")]
    ProfileDomain { tau: f64 },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("symplectic eigenvalue {nu} violates the uncertainty bound")]
    NonPhysicalState { nu: f64 },

    #[error("binary entropy argument {x} is below 1")]
    DomainError { x: f64 },

    #[error("truncation too small: {leaked:e} population outside the kept levels ({detail})")]
    TruncationTooSmall { leaked: f64, detail: String },

    #[error("dimension {dim} exceeds the dense budget {budget}")]
    DimensionBudget { dim: usize, budget: usize },

    #[error("halving the step changed an observable by {change:e} (tolerance {tol:e})")]
    StepSizeTooLarge { change: f64, tol: f64 },
}

impl Error {
    /// True for failures of a numerical contract rather than bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidParameter(_) | Error::ProfileDomain { .. })
    }
}
