use std::fmt;
use std::path::Path;

use altscan::Error;

/// Failures sorted by exit code: 1 usage or configuration, 2 data,
/// 3 violated internal invariant.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) | CliError::Internal(msg) => {
                write!(f, "{msg}")
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::InvalidOrder(_)
            | Error::InvalidSmoothing(_)
            | Error::InvalidNgramRange(_, _)
            | Error::InvalidHyperparameter(_)
            | Error::InvalidGeneratorSpec(_)
            | Error::OverlappingAlphabets(_, _)
            | Error::BinCountTooSmall(_)
            | Error::ElbowRangeTooNarrow(_, _) => CliError::Usage(err.to_string()),
            Error::NonFiniteLoss { .. } => CliError::Internal(err.to_string()),
            _ => CliError::Data(err.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Data(format!("json: {err}"))
    }
}

/// Attaches the path to an I/O or parse failure so the operator can see
/// which file was at fault.
pub fn at_path<T, E: fmt::Display>(result: Result<T, E>, path: &Path) -> CliResult<T> {
    result.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}
