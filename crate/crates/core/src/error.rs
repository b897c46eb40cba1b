use alloc::string::String;
use core::fmt;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input: shape mismatches, non-symmetric matrices,
    /// chains that are not cycles, out-of-range parameters.
    InvalidInput(String),
    /// A standing assumption of the method is violated by the data,
    /// e.g. duplicate birth-death pairs or duplicate death parameters.
    AssumptionViolated(String),
    /// The selected class is trivial (bounds) and has no extensions.
    TrivialClass,
    /// A lazy enumeration was cut off at the configured cap.
    Truncated,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::AssumptionViolated(msg) => write!(f, "assumption violated: {msg}"),
            Error::TrivialClass => write!(f, "the given class is trivial (bounds)"),
            Error::Truncated => write!(f, "enumeration truncated at cap"),
        }
    }
}
