//! Statement outputs and their tabular renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{Map, Value};

use crate::error::Result;
use crate::learn::{MlType, Outputs};
use crate::table::{write_csv, Column, Table};

/// Observed target values aligned with the outputs.
#[derive(Debug, Clone, PartialEq)]
pub enum Actuals {
    Real(Vec<f64>),
    Class(Vec<String>),
}

/// Per-row outputs of one GENERATE.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultSet {
    /// 1-based statement index.
    pub statement: usize,
    pub ml_type: MlType,
    /// Target column for pred and class; empty for clus.
    pub target_name: String,
    /// LABEL columns, each as its row tokens.
    pub labels: Vec<(String, Vec<String>)>,
    pub outputs: Outputs,
    pub actuals: Option<Actuals>,
    /// Class labels of the model in index order; empty unless class.
    pub categories: Vec<String>,
    /// True when outputs score an OVER table rather than a held-out split.
    pub over: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl ResultSet {
    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    /// Row labels for plots: the first LABEL column, else 1..n.
    pub fn row_labels(&self) -> Vec<String> {
        match self.labels.first() {
            Some((_, v)) => v.clone(),
            None => (1..=self.len()).map(|i| i.to_string()).collect(),
        }
    }

    /// Label columns, then the output column, then `actual` when known.
    pub fn to_table(&self) -> Result<Table> {
        let mut cols = Vec::new();
        for (name, values) in &self.labels {
            cols.push(Column::categorical(name, values.iter().cloned().map(Some).collect()));
        }
        let out = self.outputs.column_name();
        cols.push(match &self.outputs {
            Outputs::Real(v) => Column::numeric(out, v.iter().copied().map(Some).collect())?,
            Outputs::Class(v) => Column::categorical(out, v.iter().cloned().map(Some).collect()),
            Outputs::Cluster(v) => Column::numeric(out, v.iter().map(|&c| Some(c as f64)).collect())?,
        });
        match &self.actuals {
            Some(Actuals::Real(v)) => cols.push(Column::numeric("actual", v.iter().copied().map(Some).collect())?),
            Some(Actuals::Class(v)) => cols.push(Column::categorical("actual", v.iter().cloned().map(Some).collect())),
            None => {}
        }
        Table::new(format!("stmt{:02}_result", self.statement), cols)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        write_csv(&self.to_table()?, &mut buf)?;
        Ok(String::from_utf8(buf).unwrap_or_default())
    }

    /// Standard-output rendering.
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        let t = self.to_table()?;
        Ok(match format {
            OutputFormat::Csv => self.to_csv()?,
            OutputFormat::Table => fixed_width(&t),
            OutputFormat::Json => json_lines(&t),
        })
    }
}

/// Left-aligned columns padded to their widest cell, headers underlined.
pub fn fixed_width(t: &Table) -> String {
    let headers: Vec<String> = t.column_names().map(str::to_string).collect();
    let rows: Vec<Vec<String>> = (0..t.row_count()).map(|r| t.row_tokens(r)).collect();
    let widths: Vec<usize> = (0..headers.len())
        .map(|j| {
            rows.iter()
                .map(|r| r[j].chars().count())
                .chain([headers[j].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        let mut s = String::new();
        for (j, c) in cells.iter().enumerate() {
            if j > 0 {
                s.push_str("  ");
            }
            let _ = write!(s, "{c:<w$}", w = widths[j]);
        }
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(&headers);
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&line(&rule));
    for r in &rows {
        out.push_str(&line(r));
    }
    out
}

/// One JSON object per row; numeric cells become JSON numbers.
pub fn json_lines(t: &Table) -> String {
    let mut out = String::new();
    for r in 0..t.row_count() {
        let mut obj = Map::new();
        for c in t.columns() {
            let v = match c.cell(r) {
                crate::table::Cell::Missing => Value::Null,
                crate::table::Cell::Number(v) => serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number),
                crate::table::Cell::Text(s) => Value::String(s.to_string()),
            };
            obj.insert(c.name().to_string(), v);
        }
        out.push_str(&Value::Object(obj).to_string());
        out.push('\n');
    }
    out
}

/// Per-class counts in category order, for class bar plots.
pub fn class_counts(r: &ResultSet) -> Vec<(String, usize)> {
    let Outputs::Class(v) = &r.outputs else {
        return Vec::new();
    };
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for c in v {
        *counts.entry(c).or_default() += 1;
    }
    r.categories
        .iter()
        .map(|c| (c.clone(), counts.get(c.as_str()).copied().unwrap_or(0)))
        .collect()
}
