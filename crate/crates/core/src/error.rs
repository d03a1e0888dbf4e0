use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown objective '{0}'")]
    UnknownObjective(String),

    #[error("unknown algorithm '{0}'")]
    UnknownAlgorithm(String),

    #[error("invalid dimension {dim} for '{name}': {reason}")]
    InvalidDimension {
        name: String,
        dim: usize,
        reason: &'static str,
    },

    #[error("invalid search box: {0}")]
    InvalidBox(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Every particle carried zero weight. Widen gamma, add particles or lower theta.
    #[error("all {particles} importance weights vanished at t = {t} (step {step})")]
    DegenerateWeights { step: usize, t: f64, particles: usize },

    #[error("non-finite chain state at step {step} (t = {t}): {detail}")]
    NonFinite { step: usize, t: f64, detail: String },

    #[error("chain {index} failed: {source}")]
    Chain {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("schedule evaluated at t = {0}, outside [0, 1)")]
    ScheduleDomain(f64),

    #[error("special function domain error: {0}")]
    Domain(String),

    #[error("bisection did not converge: {0}")]
    Bisection(String),
}

impl Error {
    /// Strips [`Error::Chain`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Chain { source, .. } => source.root(),
            other => other,
        }
    }
}
