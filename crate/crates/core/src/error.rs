use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A request exceeded one of the configured memory or work budgets.
    #[error("{what} of {requested} exceeds the configured cap of {cap}")]
    Resource {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("invalid input: {0}")]
    Input(String),

    /// A query fell outside the range a precomputed table covers.
    #[error("{what} {requested} is outside the table range (limit {limit})")]
    Range {
        what: &'static str,
        requested: f64,
        limit: u64,
    },

    #[error("integer overflow evaluating {0}")]
    Overflow(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
