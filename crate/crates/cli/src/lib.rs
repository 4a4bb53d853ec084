//! Text formats and command implementations behind the `cohfeed` binary.
//!
//! * [`config`]: flat `key=value` scenario files,
//! * [`formats`]: complex vectors, unitary files, netlists, efficiency tables,
//! * [`output`]: CSV/JSON tables and reports,
//! * [`commands`]: one function per subcommand.

#![forbid(unsafe_code)]

pub mod commands;
pub mod config;
pub mod formats;
pub mod output;

use std::fmt;
use std::path::PathBuf;

/// A malformed input file or value, with its location when known.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct InputError {
    /// Source file, if the input came from one.
    pub file: Option<PathBuf>,
    /// One-based line number, if known.
    pub line: Option<usize>,
    /// What went wrong.
    pub message: String,
}

impl InputError {
    /// Error without a location.
    pub fn new(message: impl Into<String>) -> Self {
        Self { file: None, line: None, message: message.into() }
    }

    /// Error at a line.
    pub fn at(line: usize, message: impl Into<String>) -> Self {
        Self { file: None, line: Some(line), message: message.into() }
    }

    /// Attaches the file name.
    pub fn in_file(mut self, file: impl Into<PathBuf>) -> Self {
        self.file = Some(file.into());
        self
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.file, self.line) {
            (Some(p), Some(l)) => write!(f, "{}:{}: {}", p.display(), l, self.message),
            (Some(p), None) => write!(f, "{}: {}", p.display(), self.message),
            (None, Some(l)) => write!(f, "line {}: {}", l, self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

/// Outcome of a verification-style command that completed without input errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Everything checked out.
    Ok,
    /// A verification step failed.
    VerificationFailed,
}

impl Status {
    /// Process exit code: 0 or 2.
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Ok => 0,
            Self::VerificationFailed => 2,
        }
    }
}
