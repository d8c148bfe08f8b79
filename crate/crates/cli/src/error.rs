use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// A configuration key that failed to parse or validate.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: PathBuf, line: usize },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: &'static str, message: String },
    #[error("input path does not exist: {0}")]
    MissingInput(PathBuf),
    #[error("`input_path` is required for this command")]
    NoInput,
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
}

/// Failure inside one pipeline stage.
#[derive(Debug, Error)]
pub enum StageError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: column `{column}`: {message}")]
    Schema {
        path: PathBuf,
        line: u64,
        column: String,
        message: String,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error(transparent)]
    Numeric(#[from] stopwords_rmt_core::Error),
}

impl StageError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        StageError::Io {
            path: path.into(),
            source,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: StageError,
    },
}

impl CliError {
    /// 2 for usage and configuration problems, 1 for pipeline failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Stage { .. } => 1,
        }
    }
}

pub(crate) trait InStage<T> {
    fn in_stage(self, stage: &'static str) -> Result<T, CliError>;
}

impl<T, E: Into<StageError>> InStage<T> for Result<T, E> {
    fn in_stage(self, stage: &'static str) -> Result<T, CliError> {
        self.map_err(|e| CliError::Stage {
            stage,
            source: e.into(),
        })
    }
}
