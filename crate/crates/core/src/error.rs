use thiserror::Error;

/// Errors raised by the channel, region and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("value {value} outside the domain of {what}")]
    Domain { what: &'static str, value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid probability vector: {0}")]
    InvalidPmf(String),

    #[error("unknown axis `{0}`")]
    UnknownAxis(String),

    #[error("axis `{0}` appears in more than one argument")]
    AxisOverlap(String),

    #[error("table of {entries} entries exceeds the cap of {cap}")]
    TableTooLarge { entries: usize, cap: usize },

    #[error("channel `{0}` is not deterministic")]
    NotDeterministic(&'static str),

    #[error("premise not satisfied: {0}")]
    Premise(String),

    #[error("inadmissible parameters: {}", .0.join("; "))]
    Inadmissible(Vec<String>),

    #[error("joint distribution violates the required factorization: {0}")]
    Factorization(String),

    #[error("enumerability cap exceeded: {0}")]
    CapExceeded(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
