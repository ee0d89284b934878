use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A CSV cell could not be interpreted. `line` is 1-based.
    #[error("line {line}, column `{column}`: {message}")]
    Parse {
        line: u64,
        column: String,
        message: String,
    },

    /// A JSON document is well-formed but does not follow the table schema.
    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("no data rows")]
    NoDataRows,

    #[error("table failed validation with {} violation(s)", .0.len())]
    Invalid(Vec<Violation>),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("unsupported confidence level {0}; expected 0.90, 0.95 or 0.99")]
    UnsupportedConfidence(f64),

    #[error("{name} out of range: {value}")]
    OutOfRange { name: &'static str, value: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn out_of_range(name: &'static str, value: impl ToString) -> Self {
        Error::OutOfRange {
            name,
            value: value.to_string(),
        }
    }
}
