use alloc::string::String;

/// Errors reported by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A protocol or simulation configuration is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
    /// A numerical routine failed or produced an untrustworthy result.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// An LFSR was seeded with the all-zero state.
    #[error("degenerate LFSR seed: the all-zero state is absorbing")]
    DegenerateSeed,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
