use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state {0} has no up-successor")]
    NoUpSuccessor(String),
    #[error("state {0} has no down-successor")]
    NoDownSuccessor(String),
    #[error("inadmissible input step {delta:+} at index {index} from state {state}")]
    InadmissibleStep {
        index: usize,
        delta: i8,
        state: String,
    },
    #[error("invalid state string {0:?}")]
    InvalidState(String),
    #[error("resource budget exceeded: {what} = {requested} (limit {limit})")]
    Budget {
        what: &'static str,
        requested: u64,
        limit: u64,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// Stable short code used in the `error[CODE]:` diagnostic prefix.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NoUpSuccessor(_) | Error::NoDownSuccessor(_) => "no-successor",
            Error::InadmissibleStep { .. } => "inadmissible-step",
            Error::InvalidState(_) => "invalid-state",
            Error::Budget { .. } => "budget",
            Error::Precondition(_) => "precondition",
            Error::DimensionMismatch { .. } => "dimension",
            Error::NonConvergence { .. } => "non-convergence",
            Error::Usage(_) => "usage",
        }
    }
}
