use std::fmt;

use dominion_core::Error;
use serde::Serialize;

/// Machine-readable failure written to the error stream; always exit code 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
    /// JSON pointer into the input, empty when not tied to a location.
    pub path: String,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>, path: impl Into<String>) -> Self {
        Self { code, message: message.into(), path: path.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new("usage", message, "")
    }

    pub fn schema(path: &str, message: impl Into<String>) -> Self {
        Self::new("schema", message, path)
    }

    pub fn invariant(path: &str, message: impl Into<String>) -> Self {
        Self::new("invariant", message, path)
    }

    pub fn at(path: &str, err: Error) -> Self {
        let code = match err {
            Error::NoConvergence { .. } => "numerical",
            Error::PreconditionViolated(_) | Error::PositivityPreconditionFailed(_) => "precondition",
            Error::AlphaOutOfRange { .. } | Error::NegativeTime(_) | Error::InvalidParameters(_) => "parameter",
            Error::PairingUnavailable(_) | Error::ConeNotIsotone(_) => "unsupported",
            _ => "invariant",
        };
        Self::new(code, err.to_string(), path)
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        Self::at("", err)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}: {}", self.code, self.message)
        } else {
            write!(f, "{} at {}: {}", self.code, self.path, self.message)
        }
    }
}

impl std::error::Error for CliError {}
