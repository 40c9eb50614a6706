//! The JSON report and the exit-code mapping for errors.

use chipfire_core::Error;
use serde::Serialize;
use serde_json::Value;

/// Printed once on stdout for every successful invocation.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    /// Every parameter that determines the result, seeds included.
    pub inputs: Value,
    pub results: Value,
    pub version: &'static str,
    /// True for closed-form or exhaustive results, false for sampled ones.
    pub exact: bool,
    /// False when a requested check failed; the process then exits with 1.
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str, inputs: Value, results: Value, exact: bool) -> Self {
        Self {
            command: command.to_string(),
            inputs,
            results,
            version: env!("CARGO_PKG_VERSION"),
            exact,
            passed: true,
        }
    }

    pub fn with_check(mut self, passed: bool) -> Self {
        self.passed = passed;
        self
    }
}

/// An error message with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GraphSyntax(_)
            | Error::Precondition(_)
            | Error::NegativeCount(_)
            | Error::BadLabel(_)
            | Error::UnsupportedGraph(_)
            | Error::Infeasible(_)
            | Error::NotPermutation(_)
            | Error::VertexOutOfDomain(_) => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}
