use thiserror::Error;

/// Errors raised by the library.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Inversion of the zero element of a cyclotomic field.
    #[error("division by zero in Q(zeta_{conductor})")]
    DivisionByZero { conductor: u32 },

    /// An embedding was requested into a field that does not contain the source field.
    #[error("conductor {from} does not divide {to}")]
    NotADivisor { from: u32, to: u32 },

    /// An argument violates a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation needs element enumeration or finite data that an infinite family lacks.
    #[error("unsupported for {family}: {what}")]
    Unsupported { family: String, what: String },

    /// An infinite family was used without a truncation depth.
    #[error("a truncation depth is required for the infinite family {0}")]
    MissingTruncation(String),

    /// A computation would exceed the configured resource guard.
    #[error("resource guard exceeded: k = {k} is above the limit {limit} for {what}")]
    GuardExceeded { what: String, k: usize, limit: usize },

    /// Malformed textual or JSON input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
