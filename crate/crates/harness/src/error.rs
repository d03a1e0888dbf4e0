use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("line {line}: {message}")]
    Plan { line: usize, message: String },
    #[error("missing required key '{0}'")]
    MissingKey(&'static str),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] zopt_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

impl HarnessError {
    /// True for mistakes in the user's input, as opposed to failures while running.
    pub fn is_user_error(&self) -> bool {
        match self {
            HarnessError::Plan { .. } | HarnessError::MissingKey(_) | HarnessError::Invalid(_) => true,
            HarnessError::Core(e) => matches!(
                e.root(),
                zopt_core::Error::UnknownObjective(_)
                    | zopt_core::Error::UnknownAlgorithm(_)
                    | zopt_core::Error::InvalidDimension { .. }
                    | zopt_core::Error::InvalidParameter(_)
                    | zopt_core::Error::InvalidBox(_)
            ),
            HarnessError::Io { .. } | HarnessError::Csv { .. } => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarnessError {
    let path = path.into();
    move |source| HarnessError::Io { path, source }
}
