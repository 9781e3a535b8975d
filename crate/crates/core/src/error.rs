use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("party count {m} outside supported range {min}..={max}")]
    PartyCount { m: usize, min: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown catalog graph `{0}`")]
    UnknownGraph(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Raised when an operation needs a totally paired graph.
    #[error("graph is partially paired: no party sees both x{0} and x{1}")]
    PartiallyPaired(usize, usize),

    #[error("parity subspace dimension {dim} exceeds enumeration cap {cap}")]
    Capacity { dim: usize, cap: usize },

    #[error("strategy count {count} exceeds brute-force cap {cap}")]
    StrategyCap { count: String, cap: u128 },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// I/O and input-format failures, as opposed to errors raised by the
    /// mathematics on well-formed input.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Json(_) | Error::Parse(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::PartyCount { .. } => "party_count",
            Error::Dimension(_) => "dimension",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::UnknownGraph(_) => "unknown_graph",
            Error::InvalidParams(_) => "invalid_params",
            Error::PartiallyPaired(..) => "partially_paired",
            Error::Capacity { .. } => "capacity",
            Error::StrategyCap { .. } => "strategy_cap",
            Error::InvalidStrategy(_) => "invalid_strategy",
            Error::InvalidMixture(_) => "invalid_mixture",
            Error::Unsupported(_) => "unsupported",
            Error::Parse(_) => "parse",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}

pub(crate) fn check_party_count(m: usize, min: usize, max: usize) -> Result<()> {
    if m < min || m > max {
        return Err(Error::PartyCount { m, min, max });
    }
    Ok(())
}
