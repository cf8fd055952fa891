use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Malformed polynomial text; `offset` is a byte offset into the input.
    Parse { offset: usize, message: String },
    UndeclaredVariable(String),
    UnsupportedDivision(String),
    /// An operation needs rational values where symbolic parameters remain.
    NotInstantiated(String),
    Domain(String),
    InvalidAlgebra(String),
    InvalidSlot { slot: String, reason: String },
    Condition1(String),
    Unknown(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { offset, message } => write!(f, "parse error at byte {offset}: {message}"),
            Error::UndeclaredVariable(v) => write!(f, "undeclared variable `{v}`"),
            Error::UnsupportedDivision(m) => write!(f, "unsupported division: {m}"),
            Error::NotInstantiated(m) => write!(f, "parameters must be instantiated: {m}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::InvalidAlgebra(m) => write!(f, "invalid algebra: {m}"),
            Error::InvalidSlot { slot, reason } => write!(f, "slot `{slot}`: {reason}"),
            Error::Condition1(m) => write!(f, "Condition 1 violated: {m}"),
            Error::Unknown(m) => write!(f, "unknown {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
