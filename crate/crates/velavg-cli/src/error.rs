use serde::Serialize;

/// What went wrong before a report could be produced. Every kind exits with 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    /// Unknown flag, malformed value or missing argument.
    Usage,
    /// Invalid or inconsistent configuration.
    Config,
    /// The library rejected the parameters while computing.
    Computation,
    Io,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{kind:?}: {message}")]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Config, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Io, message: message.into() }
    }

    /// A library error raised after validation, while computing.
    pub fn computation(e: velavg::Error) -> Self {
        match e {
            velavg::Error::Io(m) => CliError::io(m),
            other => CliError { kind: ErrorKind::Computation, message: other.to_string() },
        }
    }
}

impl From<velavg::Error> for CliError {
    fn from(e: velavg::Error) -> Self {
        let kind = match e {
            velavg::Error::Io(_) => ErrorKind::Io,
            _ => ErrorKind::Config,
        };
        CliError { kind, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

/// The record printed to stderr when a run ends with exit code 2.
#[derive(Debug, Serialize)]
pub struct ErrorRecord<'a> {
    pub schema: &'static str,
    pub schema_version: u32,
    pub exit_code: i32,
    pub kind: ErrorKind,
    pub message: &'a str,
}
