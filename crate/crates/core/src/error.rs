use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = MqlError> = std::result::Result<T, E>;

/// Every failure the engine can report, from lexing to model persistence.
#[derive(Debug, Error)]
pub enum MqlError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Format(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("column `{0}` listed more than once")]
    DuplicateColumn(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("column `{0}` has no non-missing values")]
    EmptyColumn(String),

    #[error("{line}:{column}: unexpected character `{ch}`")]
    Lex { line: usize, column: usize, ch: char },
    #[error("{line}:{column}: found {found}, expected {expected}")]
    Parse {
        line: usize,
        column: usize,
        found: String,
        expected: String,
    },
    #[error("USING MODEL and ALGORITHM cannot both be given")]
    Exclusivity,

    #[error("accuracy {0} is outside (0, 100]")]
    Range(f64),

    #[error("column `{0}` is not numeric")]
    NotNumeric(String),
    #[error("column `{column}` has {have} values, need at least {need}")]
    TooFewValues {
        column: String,
        have: usize,
        need: usize,
    },
    #[error("row {row}: {message}")]
    Domain { row: usize, message: String },

    #[error("TRAIN ON {requested} exceeds the {available} available rows")]
    TrainTooLarge { requested: usize, available: usize },
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),
    #[error("k = {k} exceeds the {rows} training rows")]
    KTooLarge { k: usize, rows: usize },
    #[error("cluster count {k} exceeds the {rows} rows")]
    KExceedsRows { k: usize, rows: usize },
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("empty test set")]
    EmptyTestSet,
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("no model reached accuracy {threshold}: {}", format_scores(.scores))]
    BestBelowThreshold {
        threshold: f64,
        scores: Vec<(String, f64)>,
    },
    #[error("model `{model}` scores {score:.6}, below the requested accuracy {threshold}")]
    AccuracyBelowThreshold {
        model: String,
        score: f64,
        threshold: f64,
    },
    #[error("invalid expression: {0}")]
    Expression(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("model `{0}` already exists (use replace to overwrite)")]
    NameCollision(String),
    #[error("invalid model name `{0}`")]
    InvalidModelName(String),
    #[error("corrupt model `{name}`: {reason}")]
    CorruptManifest { name: String, reason: String },

    #[error("no column holds all of the class labels {}", .0.join(", "))]
    UnknownLabels(Vec<String>),
    #[error("class labels fit several columns ({}); restrict FEATURES or FROM", .0.join(", "))]
    AmbiguousTarget(Vec<String>),
    #[error("target `{target}` is not a column of `{table}`")]
    TargetNotInSchema { target: String, table: String },
    #[error("target `{0}` is also listed in FEATURES")]
    TargetInFeatures(String),
    #[error("{0}")]
    SupervisionMismatch(String),
    #[error("column `{column}` {reason}; wrangle it with INSPECT first")]
    DatatypeFail { column: String, reason: String },

    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("cannot emit a backend script: {0}")]
    UnsupportedForEmission(String),

    #[error("nothing to plot")]
    EmptyResult,
    #[error("result has no actual values to plot against")]
    MissingActuals,
    #[error("cluster plot needs at least two numeric features")]
    TooFewFeatures,
}

fn format_scores(scores: &[(String, f64)]) -> String {
    scores
        .iter()
        .map(|(name, s)| format!("{name}={s:.6}"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl MqlError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MqlError::Io {
            path: path.into(),
            source,
        }
    }
}
