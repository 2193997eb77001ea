use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit reports. Display strings are prefixed with the
/// module that raised them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus: malformed CSV at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("{module}: schema error: {message}")]
    Schema {
        module: &'static str,
        message: String,
    },

    #[error("corpus: duplicate requirement id `{0}`")]
    DuplicateId(String),

    #[error("corpus: requested {requested} negative pairs but only {pool} eligible pairs exist")]
    Capacity { requested: usize, pool: usize },

    #[error("corpus: {positives} positives but only {negatives} negatives available")]
    Imbalance { positives: usize, negatives: usize },

    #[error("corpus: {0}")]
    Size(String),

    #[error("corpus: {0}")]
    Range(String),

    #[error("classify: cannot fit vectorizer: {0}")]
    Fit(String),

    #[error("classify: degenerate training data: {0}")]
    DegenerateData(String),

    #[error("classify: invalid hyperparameter: {0}")]
    Hyperparameter(String),

    #[error("classify: evaluation error: {0}")]
    Evaluation(String),

    #[error("roi: invalid parameter: {0}")]
    Parameter(String),

    #[error("roi: ROI undefined for cost {cost}")]
    UndefinedRoi { cost: f64 },

    #[error("harness: {0}")]
    Harness(String),

    #[error("harness: curves not comparable: {0}")]
    Comparability(String),

    #[error("harness: scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },

    #[error("report: {0}")]
    Chart(String),

    #[error("config: `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Module that raised the error, used in machine-readable diagnostics.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Parse { .. }
            | Error::DuplicateId(_)
            | Error::Capacity { .. }
            | Error::Imbalance { .. }
            | Error::Size(_)
            | Error::Range(_) => "corpus",
            Error::Schema { module, .. } => module,
            Error::Fit(_)
            | Error::DegenerateData(_)
            | Error::Hyperparameter(_)
            | Error::Evaluation(_) => "classify",
            Error::Parameter(_) | Error::UndefinedRoi { .. } => "roi",
            Error::Harness(_) | Error::Comparability(_) | Error::Scenario { .. } => "harness",
            Error::Chart(_) => "report",
            Error::Config { .. } => "config",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
