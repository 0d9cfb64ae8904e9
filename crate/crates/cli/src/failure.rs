//! Exit-code classification for command failures.

use std::fmt;

/// Failures with a dedicated exit code. Anything else exits with 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// Bad flags, config values or parameter ranges.
    Usage(String),
    /// A checked property of the output did not hold.
    Invariant(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Invariant(m) => write!(f, "invariant violated: {m}"),
        }
    }
}

impl std::error::Error for Failure {}

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Failure>() {
        Some(Failure::Usage(_)) => EXIT_USAGE,
        Some(Failure::Invariant(_)) => EXIT_INVARIANT,
        None => 1,
    }
}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    Failure::Usage(msg.into()).into()
}

pub fn invariant(msg: impl Into<String>) -> anyhow::Error {
    Failure::Invariant(msg.into()).into()
}
