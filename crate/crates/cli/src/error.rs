use shapelab_core::ShapeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Shape(#[from] ShapeError),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for numerical failures, 1 for everything the user can fix.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Shape(e) if e.is_solver_failure() => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
