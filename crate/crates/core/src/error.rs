use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: wrong shapes, unknown fields, missing data.
    #[error("schema error: {0}")]
    Schema(String),
    /// Well-formed input outside the domain of an operation (point not in a set, empty set, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A combinatorial enumeration exceeded its configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// An internal solver failed to converge or produced an inconsistent certificate.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// The input lies outside what the exact algorithms handle.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Same kind of error with `ctx` prefixed to its message.
    pub fn context(self, ctx: &str) -> Error {
        match self {
            Error::Schema(m) => Error::Schema(format!("{ctx}: {m}")),
            Error::Domain(m) => Error::Domain(format!("{ctx}: {m}")),
            Error::Budget(m) => Error::Budget(format!("{ctx}: {m}")),
            Error::Numerical(m) => Error::Numerical(format!("{ctx}: {m}")),
            Error::Unsupported(m) => Error::Unsupported(format!("{ctx}: {m}")),
        }
    }
}
