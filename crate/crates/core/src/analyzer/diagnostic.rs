use std::fmt;

use serde::Serialize;

use crate::error::MqlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

macro_rules! codes {
    ($($name:ident = $num:literal,)*) => {
        /// Machine-readable diagnostic codes, rendered as `MQL-nnn`.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
        pub enum Code { $($name,)* }

        impl Code {
            pub fn number(self) -> u16 {
                match self { $(Code::$name => $num,)* }
            }
        }
    };
}

codes! {
    Syntax = 1,
    Exclusivity = 2,
    UnknownTable = 101,
    UnknownColumn = 102,
    TargetNotInSchema = 103,
    TargetInFeatures = 104,
    UnknownLabels = 105,
    AmbiguousTarget = 106,
    DuplicateColumn = 107,
    MultipleTables = 108,
    NoInput = 109,
    TypeMismatch = 110,
    DatatypeFail = 201,
    SupervisionMismatch = 202,
    UnknownAlgorithm = 203,
    UnknownModel = 204,
    ModelSchemaMismatch = 205,
    AccuracyRange = 206,
    AccuracyRescaled = 207,
    ClassColumnExcluded = 208,
    TrainTooLarge = 301,
    TestClamped = 302,
    RowsDropped = 303,
    BestBelowThreshold = 304,
    AccuracyBelowThreshold = 305,
    DegenerateDesign = 306,
    KOutOfRange = 307,
    EmptyTestSet = 308,
    Domain = 309,
    NotNumeric = 310,
    TooFewValues = 311,
    Expression = 312,
    NameCollision = 401,
    InvalidModelName = 402,
    CorruptManifest = 403,
    Io = 404,
    Format = 405,
    Unsupported = 501,
    UnsupportedForEmission = 502,
    Display = 601,
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MQL-{:03}", self.number())
    }
}

impl Code {
    pub fn of(e: &MqlError) -> Code {
        use MqlError as E;
        match e {
            E::Io { .. } => Code::Io,
            E::Format(_) => Code::Format,
            E::UnknownColumn(_) => Code::UnknownColumn,
            E::DuplicateColumn(_) => Code::DuplicateColumn,
            E::TypeMismatch(_) => Code::TypeMismatch,
            E::EmptyColumn(_) | E::TooFewValues { .. } => Code::TooFewValues,
            E::Lex { .. } | E::Parse { .. } => Code::Syntax,
            E::Exclusivity => Code::Exclusivity,
            E::Range(_) => Code::AccuracyRange,
            E::NotNumeric(_) => Code::NotNumeric,
            E::Domain { .. } => Code::Domain,
            E::TrainTooLarge { .. } => Code::TrainTooLarge,
            E::DegenerateDesign(_) => Code::DegenerateDesign,
            E::KTooLarge { .. } | E::KExceedsRows { .. } => Code::KOutOfRange,
            E::SchemaMismatch(_) => Code::ModelSchemaMismatch,
            E::EmptyTestSet => Code::EmptyTestSet,
            E::UnknownAlgorithm(_) => Code::UnknownAlgorithm,
            E::BestBelowThreshold { .. } => Code::BestBelowThreshold,
            E::AccuracyBelowThreshold { .. } => Code::AccuracyBelowThreshold,
            E::Expression(_) => Code::Expression,
            E::UnknownModel(_) => Code::UnknownModel,
            E::NameCollision(_) => Code::NameCollision,
            E::InvalidModelName(_) => Code::InvalidModelName,
            E::CorruptManifest { .. } => Code::CorruptManifest,
            E::UnknownLabels(_) => Code::UnknownLabels,
            E::AmbiguousTarget(_) => Code::AmbiguousTarget,
            E::TargetNotInSchema { .. } => Code::TargetNotInSchema,
            E::TargetInFeatures(_) => Code::TargetInFeatures,
            E::SupervisionMismatch(_) => Code::SupervisionMismatch,
            E::DatatypeFail { .. } => Code::DatatypeFail,
            E::UnknownTable(_) => Code::UnknownTable,
            E::Unsupported(_) => Code::Unsupported,
            E::UnsupportedForEmission(_) => Code::UnsupportedForEmission,
            E::EmptyResult | E::MissingActuals | E::TooFewFeatures => Code::Display,
        }
    }
}

/// A problem found while checking or running one statement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    /// 1-based statement index; 0 for program-level problems.
    pub statement: usize,
    pub clause: Option<&'static str>,
    pub code: Code,
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: Code, clause: Option<&'static str>, message: impl Into<String>) -> Self {
        Diagnostic {
            statement: 0,
            clause,
            code,
            severity: Severity::Error,
            message: message.into(),
        }
    }

    pub fn warning(code: Code, clause: Option<&'static str>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(code, clause, message)
        }
    }

    pub fn from_error(e: &MqlError, clause: Option<&'static str>) -> Self {
        Diagnostic::error(Code::of(e), clause, e.to_string())
    }

    pub fn at(mut self, statement: usize) -> Self {
        self.statement = statement;
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}[{}]: ", self.code)?;
        match (self.statement, self.clause) {
            (0, None) => {}
            (0, Some(c)) => write!(f, "{c}: ")?,
            (s, None) => write!(f, "statement {s}: ")?,
            (s, Some(c)) => write!(f, "statement {s}, {c}: ")?,
        }
        f.write_str(&self.message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_code_and_location() {
        let d = Diagnostic::error(Code::TargetInFeatures, Some("FEATURES"), "target `MEDV` is also listed in FEATURES").at(2);
        assert_eq!(
            d.to_string(),
            "error[MQL-104]: statement 2, FEATURES: target `MEDV` is also listed in FEATURES"
        );
        let w = Diagnostic::warning(Code::AccuracyRescaled, None, "x").at(1);
        assert_eq!(w.to_string(), "warning[MQL-207]: statement 1: x");
    }
}
