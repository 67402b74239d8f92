use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fractional order must lie in (0, 1], got {0}")]
    InvalidOrder(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("gamma function pole at {0}")]
    Pole(f64),

    #[error("argument {value} outside the supported range |z| <= {limit} for {function}")]
    ArgumentOutOfRange {
        function: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("{function}: series did not converge within {terms} terms (last term {last_term:e})")]
    ConvergenceBudget {
        function: &'static str,
        terms: usize,
        last_term: f64,
    },

    #[error("{function}: cancellation in the series leaves an absolute error of ~{estimate:e}")]
    PrecisionLoss { function: &'static str, estimate: f64 },

    #[error("truncated tail bound {bound:e} exceeds tolerance {tolerance:e}")]
    TailNotNegligible { bound: f64, tolerance: f64 },

    #[error("quadrature did not reach tolerance {tolerance:e} (error estimate {estimate:e})")]
    QuadratureFailed { estimate: f64, tolerance: f64 },

    #[error("time node {node} outside 1..={steps}")]
    NodeOutOfRange { node: usize, steps: usize },

    #[error("small-lag contribution {value:e} exceeds its slope bound {bound:e}; the improper integral may not exist")]
    Divergence { value: f64, bound: f64 },

    #[error("CFL condition violated: {number:.6} > {limit:.6}")]
    CflViolation { number: f64, limit: f64 },

    #[error("viscosity coefficient {theta} is below the Hamiltonian's gradient bound {lip_p}")]
    InsufficientViscosity { theta: f64, lip_p: f64 },

    #[error("non-finite value at time step {step}")]
    BlowUp { step: usize },

    #[error("implicit step {step} did not converge (last update {residual:e})")]
    ImplicitSolve { step: usize, residual: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("no oracle available: {0}")]
    OracleUnavailable(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
