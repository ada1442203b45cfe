//! Runs programs statement by statement: gather, validate, dispatch. The first
//! error aborts the rest of the program; outputs already produced are kept.

mod construct;
mod generate;
mod session;

use std::path::{Path, PathBuf};
use std::sync::Arc;

pub use session::{Backend, Clock, MissingPolicy, Session};

use crate::analyzer::{gather, validate, Code, Delta, Diagnostic, StType};
use crate::error::{MqlError, Result};
use crate::result::ResultSet;
use crate::store::Manifest;
use crate::syntax::{parse_program, Statement};
use crate::table::{write_csv, Table};
use crate::wrangler::{inspect_execute, WrangleLog};

/// What a statement produced.
#[derive(Debug, Clone)]
pub enum Output {
    Table {
        statement: usize,
        name: String,
        table: Arc<Table>,
        log: WrangleLog,
    },
    Model {
        statement: usize,
        manifest: Manifest,
    },
    Result(ResultSet),
    /// Every candidate's score from a best-model sweep, in registry order.
    Sweep {
        statement: usize,
        scores: Vec<(String, f64)>,
    },
    Script {
        statement: usize,
        path: PathBuf,
    },
}

#[derive(Debug, Default)]
pub struct Report {
    pub outputs: Vec<Output>,
    /// Errors and warnings, each tagged with its statement index.
    pub diagnostics: Vec<Diagnostic>,
    /// Files written, in order.
    pub artifacts: Vec<PathBuf>,
    /// True when an error stopped the program early.
    pub aborted: bool,
}

impl Report {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }

    pub fn results(&self) -> impl Iterator<Item = &ResultSet> {
        self.outputs.iter().filter_map(|o| match o {
            Output::Result(r) => Some(r),
            _ => None,
        })
    }

    pub(crate) fn warn(&mut self, statement: usize, code: Code, clause: Option<&'static str>, msg: String) {
        self.diagnostics.push(Diagnostic::warning(code, clause, msg).at(statement));
    }
}

/// Clause a runtime error is attributed to.
fn clause_of(e: &MqlError) -> Option<&'static str> {
    Some(match e {
        MqlError::TrainTooLarge { .. } => "TRAIN ON",
        MqlError::BestBelowThreshold { .. } | MqlError::AccuracyBelowThreshold { .. } => "WITH MODEL ACCURACY",
        MqlError::UnknownModel(_) => "USING MODEL",
        MqlError::KExceedsRows { .. } => "CLUSTER OF",
        MqlError::EmptyResult | MqlError::MissingActuals | MqlError::TooFewFeatures => "DISPLAY OF",
        _ => return None,
    })
}

/// File stem used for artifacts derived from a table name.
pub(crate) fn table_stem(name: &str) -> String {
    let key = session::binding_key(name);
    Path::new(key)
        .file_name()
        .map_or_else(|| key.to_string(), |s| s.to_string_lossy().into_owned())
}

impl Session {
    /// Parses and runs `text`. A syntax error runs nothing.
    pub fn run_text(&mut self, text: &str) -> Report {
        match parse_program(text) {
            Ok(stmts) => self.run_program(&stmts),
            Err(e) => Report {
                diagnostics: vec![Diagnostic::from_error(&e, None)],
                aborted: true,
                ..Report::default()
            },
        }
    }

    pub fn run_program(&mut self, stmts: &[Statement]) -> Report {
        let mut report = Report::default();
        for (n, stmt) in stmts.iter().enumerate() {
            if !self.run_statement(stmt, &mut report) {
                report.aborted = n + 1 < stmts.len();
                break;
            }
        }
        report
    }

    /// Runs one statement into `report`; false on error.
    pub fn run_statement(&mut self, stmt: &Statement, report: &mut Report) -> bool {
        let i = self.take_statement_index();
        let d = gather(stmt);
        let diags = validate(&d, self);
        let failed = diags.iter().any(Diagnostic::is_error);
        report.diagnostics.extend(diags.into_iter().map(|x| x.at(i)));
        if failed {
            return false;
        }
        let res = match (d.st_type, self.backend) {
            (_, Backend::Emit) => self.emit_statement(&d, i, report),
            (StType::Ins, Backend::Native) => self.exec_inspect(&d, i, report),
            (StType::Con, Backend::Native) => self.exec_construct(&d, i, report),
            (StType::Gen, Backend::Native) => self.exec_generate(&d, i, report),
        };
        match res {
            Ok(()) => true,
            Err(e) => {
                report.diagnostics.push(Diagnostic::from_error(&e, clause_of(&e)).at(i));
                false
            }
        }
    }

    fn inspect_table(&self, d: &Delta) -> Result<(String, Table, WrangleLog)> {
        let name = d.from_table().unwrap_or_default().to_string();
        let t = self.resolve_table(&name)?;
        let input = match &d.filter {
            Some(p) => t.apply_where(p)?,
            None => (*t).clone(),
        };
        let (out, log) = inspect_execute(&d.actions, &input)?;
        Ok((name, out, log))
    }

    fn exec_inspect(&mut self, d: &Delta, i: usize, report: &mut Report) -> Result<()> {
        let (name, out, log) = self.inspect_table(d)?;
        let stem = table_stem(&name);
        let mut csv = Vec::new();
        write_csv(&out, &mut csv)?;
        let csv = String::from_utf8(csv).unwrap_or_default();
        report.artifacts.push(self.write_artifact(&format!("{stem}.inspected.csv"), &csv)?);
        report.artifacts.push(self.write_artifact(&format!("{stem}.wrangle.log"), &log.render())?);
        let table = self.bind(&name, out);
        report.outputs.push(Output::Table {
            statement: i,
            table,
            name,
            log,
        });
        Ok(())
    }

    fn emit_statement(&mut self, d: &Delta, i: usize, report: &mut Report) -> Result<()> {
        let script = crate::emit::emit_script(d, self, i)?;
        let path = self.write_artifact(&format!("stmt{i:02}_backend.py"), &script)?;
        if d.st_type == StType::Ins {
            let (name, out, _) = self.inspect_table(d)?;
            self.bind(&name, out);
        }
        report.artifacts.push(path.clone());
        report.outputs.push(Output::Script { statement: i, path });
        Ok(())
    }
}

#[cfg(test)]
mod tests;
