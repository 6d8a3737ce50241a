//! Error type shared across the crate.

use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Malformed or invalid input data (bad complexes, morphisms, documents).
    InvalidInput(String),
    /// A bounded search (preparation rounds, dilation, reduction rounds) ran out.
    BoundExhausted(String),
    /// An internal invariant failed; indicates a bug or a theorem violation.
    Internal(String),
    /// The morphism has relative dimension above the supported limit of 3.
    RelativeDimension(usize),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::BoundExhausted(msg) => write!(f, "bound exhausted: {msg}"),
            Error::Internal(msg) => write!(f, "internal invariant violation: {msg}"),
            Error::RelativeDimension(d) => {
                write!(f, "relative dimension {d} exceeds the supported limit 3")
            }
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

#[macro_export]
macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidInput(alloc::format!($($arg)*))
    };
}

#[macro_export]
macro_rules! internal {
    ($($arg:tt)*) => {
        $crate::error::Error::Internal(alloc::format!($($arg)*))
    };
}
