use thiserror::Error;

/// Errors produced anywhere in the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid schema: {0}")]
    Schema(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("unknown column `{0}` in header")]
    UnknownColumn(String),
    #[error("header is missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}, column \"{column}\": unknown level `{value}`")]
    UnknownLevel {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}, column \"{column}\": missing value")]
    MissingValue { row: usize, column: String },
    #[error("record does not conform to schema: {0}")]
    RecordMismatch(String),
    #[error("degenerate contingency table: {0}")]
    DegenerateTable(String),
    #[error("table total {total} exceeds exact-enumeration limit {max}; use pearson_chi_square instead")]
    TableTooLarge { total: u64, max: u64 },
    #[error("overparameterized model: {params} parameters for {records} records")]
    Overparameterized { params: usize, records: usize },
    #[error("undefined rate: {0}")]
    UndefinedRate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("rule text parse error on line {line}: {message}")]
    RuleParse { line: usize, message: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from bad user input rather than a runtime failure.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Numerical(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
