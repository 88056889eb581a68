use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid hex bit string: {0}")]
    InvalidHex(String),

    #[error("message of {bits} bits exceeds capacity of {capacity} blocks")]
    Capacity { bits: usize, capacity: usize },

    #[error("no sub-messages to decode")]
    EmptyInput,

    #[error("all {0} sub-messages were rejected (bad length or ordering index)")]
    NoValidSubMessages(usize),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
