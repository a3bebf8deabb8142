use std::fmt;
use std::path::Path;

/// CLI failure classes mapped to exit codes: validation errors exit 2,
/// stage failures exit 3.
#[derive(Debug)]
pub enum AppError {
    Validation(String),
    Stage {
        stage: &'static str,
        message: String,
    },
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Validation(msg) => write!(f, "validation error: {msg}"),
            AppError::Stage { stage, message } => write!(f, "stage {stage} failed: {message}"),
        }
    }
}

impl std::error::Error for AppError {}

impl AppError {
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Validation(_) => 2,
            AppError::Stage { .. } => 3,
        }
    }

    pub fn stage_name(&self) -> Option<&'static str> {
        match self {
            AppError::Stage { stage, .. } => Some(stage),
            AppError::Validation(_) => None,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;

pub fn validation(msg: impl Into<String>) -> AppError {
    AppError::Validation(msg.into())
}

/// Wraps a fallible stage so every error carries the stage name.
pub trait StageExt<T> {
    fn stage(self, stage: &'static str) -> AppResult<T>;
}

impl<T, E: fmt::Display> StageExt<T> for Result<T, E> {
    fn stage(self, stage: &'static str) -> AppResult<T> {
        self.map_err(|e| AppError::Stage {
            stage,
            message: e.to_string(),
        })
    }
}

pub fn require_file(path: &Path, what: &str) -> AppResult<()> {
    if !path.is_file() {
        return Err(validation(format!("{what} not found: {}", path.display())));
    }
    Ok(())
}
