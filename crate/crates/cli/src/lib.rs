//! Pipeline driver behind the `stopwords-rmt` binary.

pub mod config;
pub mod corpus_io;
pub mod error;
pub mod stages;
pub mod tables;

pub use config::{InputFormat, PipelineConfig, WordSelection};
pub use error::{CliError, ConfigError, StageError};
pub use stages::{fit, ingest, run_pipeline, select};
