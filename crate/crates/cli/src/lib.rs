//! Command implementations behind the `conley` binary. Every command takes
//! its input as text and returns its output as text, so the binary only
//! handles argument parsing, files and exit codes.

pub mod commands;
pub mod document;
pub mod dot;

pub use document::ComplexDocument;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or malformed input, or bad usage.
    #[error("{0}")]
    Parse(String),
    /// Well-formed input that is not a valid graded complex, or a request
    /// that does not make sense for it.
    #[error("{0}")]
    Semantic(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Semantic(_) => 1,
        }
    }
}
