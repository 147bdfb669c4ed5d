use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NonHermitian { residual: f64 },

    #[error("observable is not Hermitian (residual {residual:.3e})")]
    NonHermitianObservable { residual: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("matrix is singular or ill-conditioned (condition estimate {condition:.3e})")]
    SingularMatrix { condition: f64 },

    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("non-finite state encountered at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("integrator exceeded {max_steps} steps before reaching t = {t_end}")]
    TooManySteps { max_steps: usize, t_end: f64 },

    #[error("invalid ODE problem: {0}")]
    InvalidProblem(String),

    #[error("matrix is not symplectic (residual {residual:.3e})")]
    NotSymplectic { residual: f64 },

    #[error("block structure violated: {what} (residual {residual:.3e})")]
    StructureViolation { what: &'static str, residual: f64 },

    #[error("invalid moments: {0}")]
    InvalidMoments(String),

    #[error("state is not physical (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPhysical { min_eigenvalue: f64 },

    #[error("map is not classical for the open system (|X_down_S|_max = {residual:.3e})")]
    NotClassicalOpen { residual: f64 },

    #[error("family is not classical for the closed system (unitarity residual {residual:.3e})")]
    NotClassicalClosed { residual: f64 },

    #[error("invalid generators: {0}")]
    InvalidGenerators(String),

    #[error("physicality lost at t = {t} (smallest eigenvalue {min_eigenvalue:.3e})")]
    PhysicalityLost { t: f64, min_eigenvalue: f64 },

    #[error("derivative unavailable at t = {t}: {reason}")]
    DerivativeUnavailable { t: f64, reason: String },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invariant violated: {what} (worst residual {residual:.3e} at t = {t})")]
    InvariantViolated {
        what: &'static str,
        residual: f64,
        t: f64,
    },

    #[error("Fock truncation overflow: boundary population {population:.3e} exceeds {threshold:.1e}")]
    TruncationOverflow { population: f64, threshold: f64 },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
}
