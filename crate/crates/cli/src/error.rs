use frame_shadows::Error as CoreError;
use serde_json::json;

/// Failures that end the process, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Domain(_) => 4,
            CliError::Io(_) => 5,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Validation(_) => "validation",
            CliError::Domain(_) => "math_domain",
            CliError::Io(_) => "io",
        }
    }

    pub fn to_json(&self) -> String {
        json!({
            "error": {
                "kind": self.kind(),
                "code": self.exit_code(),
                "message": self.to_string(),
            }
        })
        .to_string()
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::Document(_)
            | CoreError::InvalidPovm(_)
            | CoreError::NotHermitian { .. }
            | CoreError::NotSquare { .. }
            | CoreError::InvalidState(_)
            | CoreError::DimensionMismatch { .. }
            | CoreError::DimensionTooSmall(_)
            | CoreError::TooFewOutcomes { .. }
            | CoreError::NotOrthonormal { .. } => CliError::Validation(msg),
            _ => CliError::Domain(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
