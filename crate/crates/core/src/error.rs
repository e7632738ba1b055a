use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a contest needs at least two agents, got {0}")]
    TooFewAgents(usize),
    #[error("cost of agent {index} must be positive and finite, got {value}")]
    InvalidCost { index: usize, value: f64 },
    #[error("floor action must lie in (0, 1/4], got {0}")]
    InvalidFloorAction(f64),
    #[error("agent index {index} out of range for {n} agents")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("output of agent {index} must be finite and non-negative, got {value}")]
    InvalidOutput { index: usize, value: f64 },
    #[error("profile has {got} entries, contest has {expected} agents")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operation requires homogeneous costs")]
    Heterogeneous,
    #[error("{name} out of domain: {detail}")]
    Domain { name: &'static str, detail: String },
    #[error("invalid selection weights: {0}")]
    InvalidWeights(String),
    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("csv error: {0}")]
    Csv(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            name,
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
