use std::fmt;

use sonon::bell::BellError;
use sonon::field::FieldError;
use sonon::pilot::PilotError;
use sonon::sync::SyncError;

/// Failure classes with their process exit codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad configuration: unknown key, wrong type, out-of-range value (exit 2).
    Config(String),
    /// I/O or numerical failure while running (exit 3).
    Runtime(String),
    /// The run finished but its result fails a quality gate (exit 4).
    Analysis(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
            CliError::Analysis(_) => 4,
        }
    }

    pub fn config(key: &str, msg: impl fmt::Display) -> Self {
        CliError::Config(format!("{key}: {msg}"))
    }

    pub fn io(path: &std::path::Path, err: impl fmt::Display) -> Self {
        CliError::Runtime(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
            CliError::Analysis(m) => write!(f, "analysis error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::SingularGeometry { .. } => CliError::Runtime(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<PilotError> for CliError {
    fn from(e: PilotError) -> Self {
        match e {
            PilotError::InvalidGrid(_) | PilotError::InvalidParameter(_) | PilotError::StepTooLarge(_) => {
                CliError::Config(e.to_string())
            }
            PilotError::EnsembleQuality { .. } => CliError::Analysis(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<SyncError> for CliError {
    fn from(e: SyncError) -> Self {
        match e {
            SyncError::InvalidNetwork(_) | SyncError::InvalidParameter(_) => CliError::Config(e.to_string()),
            SyncError::StepTooLarge { .. } => CliError::Runtime(e.to_string()),
            SyncError::InsufficientHistory(_) => CliError::Analysis(e.to_string()),
        }
    }
}

impl From<BellError> for CliError {
    fn from(e: BellError) -> Self {
        match e {
            BellError::InsufficientTrials { .. } => CliError::Analysis(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
