//! Exit status policy.
//!
//! 0 success, 1 other failures, 2 invalid arguments or parameters,
//! 3 I/O and file-format errors, 4 solver-capacity warnings under `--strict`.

use std::fmt;

pub const OTHER: u8 = 1;
pub const USAGE: u8 = 2;
pub const IO: u8 = 3;
pub const CAPACITY: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Capacity(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Capacity(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    CliError::Usage(msg.into()).into()
}

pub fn capacity(msg: impl Into<String>) -> anyhow::Error {
    CliError::Capacity(msg.into()).into()
}

pub fn code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return match e {
                CliError::Usage(_) => USAGE,
                CliError::Capacity(_) => CAPACITY,
            };
        }
        if let Some(e) = cause.downcast_ref::<wrapcam::Error>() {
            use wrapcam::Error::*;
            return match e {
                InvalidParams(_) | QuantizerDisabled => USAGE,
                Io { .. } | Format { .. } => IO,
                _ => OTHER,
            };
        }
        if cause.is::<std::io::Error>() || cause.is::<serde_json::Error>() {
            return IO;
        }
    }
    OTHER
}
