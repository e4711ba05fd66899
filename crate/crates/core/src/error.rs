use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid letter distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid scoring matrix: {0}")]
    InvalidMatrix(String),

    #[error("scoring matrices are defined over different alphabets")]
    AlphabetMismatch,

    #[error("symbol {0:?} is not a letter of the alphabet")]
    SymbolOutsideAlphabet(String),

    #[error("invalid alignment: {0}")]
    InvalidAlignment(String),

    #[error("strings too long for exhaustive enumeration ({len} > {max})")]
    StringsTooLong { len: usize, max: usize },

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("no letter of the change set occurs in either string")]
    NoOccurrence,

    #[error("length {len} exceeds the configured cap of {cap}")]
    SizeCap { len: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config error at `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }

    /// Errors caused by the user's input files rather than by the computation.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::InvalidAlphabet(_)
                | Error::InvalidDistribution(_)
                | Error::InvalidMatrix(_)
                | Error::InvalidPerturbation(_)
                | Error::AlphabetMismatch
                | Error::Parse(_)
        )
    }
}
