//! Immutable, typed, columnar tables with per-cell missingness.
//!
//! A [`Table`] is the value every statement consumes and produces. Columns are
//! either numeric (finite `f64`) or categorical (string tokens); the type of a
//! column is fixed when it is built and every operation returns a new table.

mod csv_io;
mod predicate;
pub(crate) mod stats;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MqlError, Result};

pub use csv_io::{is_missing_token, load_csv, read_csv, write_csv, write_csv_file};
pub use predicate::{CmpOp, Comparison, Literal, Predicate};
pub use stats::{column_stats, ColumnStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DType {
    Numeric,
    Categorical,
}

impl fmt::Display for DType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DType::Numeric => f.write_str("numeric"),
            DType::Categorical => f.write_str("categorical"),
        }
    }
}

/// A borrowed view of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell<'a> {
    Missing,
    Number(f64),
    Text(&'a str),
}

impl Cell<'_> {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    /// The token this cell serializes to; missing cells render as the empty string.
    pub fn token(&self) -> String {
        match self {
            Cell::Missing => String::new(),
            Cell::Number(v) => format_number(*v),
            Cell::Text(s) => (*s).to_string(),
        }
    }
}

/// Shortest decimal representation that parses back to the same `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<Option<f64>>),
    Categorical(Vec<Option<String>>),
}

impl ColumnData {
    fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }

    fn take(&self, rows: &[usize]) -> ColumnData {
        match self {
            ColumnData::Numeric(v) => ColumnData::Numeric(rows.iter().map(|&r| v[r]).collect()),
            ColumnData::Categorical(v) => {
                ColumnData::Categorical(rows.iter().map(|&r| v[r].clone()).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    name: String,
    data: ColumnData,
}

impl Column {
    /// Builds a numeric column. Non-finite values are rejected.
    pub fn numeric(name: impl Into<String>, cells: Vec<Option<f64>>) -> Result<Self> {
        let name = name.into();
        if cells.iter().flatten().any(|v| !v.is_finite()) {
            return Err(MqlError::TypeMismatch(format!(
                "numeric column `{name}` holds a non-finite value"
            )));
        }
        Ok(Column {
            name,
            data: ColumnData::Numeric(cells),
        })
    }

    pub fn categorical(name: impl Into<String>, cells: Vec<Option<String>>) -> Self {
        Column {
            name: name.into(),
            data: ColumnData::Categorical(cells),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dtype(&self) -> DType {
        match self.data {
            ColumnData::Numeric(_) => DType::Numeric,
            ColumnData::Categorical(_) => DType::Categorical,
        }
    }

    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell(&self, row: usize) -> Cell<'_> {
        match &self.data {
            ColumnData::Numeric(v) => v[row].map_or(Cell::Missing, Cell::Number),
            ColumnData::Categorical(v) => v[row].as_deref().map_or(Cell::Missing, Cell::Text),
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell<'_>> + '_ {
        (0..self.len()).map(move |r| self.cell(r))
    }

    pub fn missing_count(&self) -> usize {
        self.cells().filter(Cell::is_missing).count()
    }

    pub fn as_numeric(&self) -> Option<&[Option<f64>]> {
        match &self.data {
            ColumnData::Numeric(v) => Some(v),
            ColumnData::Categorical(_) => None,
        }
    }

    pub fn as_categorical(&self) -> Option<&[Option<String>]> {
        match &self.data {
            ColumnData::Categorical(v) => Some(v),
            ColumnData::Numeric(_) => None,
        }
    }

    pub fn renamed(&self, name: impl Into<String>) -> Column {
        Column {
            name: name.into(),
            data: self.data.clone(),
        }
    }
}

/// A named, immutable dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    name: String,
    columns: Vec<Column>,
    row_count: usize,
}

impl Table {
    /// Assembles a table; all columns must share a length and have unique names.
    pub fn new(name: impl Into<String>, columns: Vec<Column>) -> Result<Self> {
        let row_count = columns.first().map_or(0, Column::len);
        let mut seen = HashSet::new();
        for c in &columns {
            if c.len() != row_count {
                return Err(MqlError::Format(format!(
                    "column `{}` has {} cells, expected {row_count}",
                    c.name,
                    c.len()
                )));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(MqlError::DuplicateColumn(c.name.clone()));
            }
        }
        Ok(Table {
            name: name.into(),
            columns,
            row_count,
        })
    }

    /// A table with zero columns but a fixed number of rows.
    pub fn empty(name: impl Into<String>) -> Self {
        Table {
            name: name.into(),
            columns: Vec::new(),
            row_count: 0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(&self, name: impl Into<String>) -> Table {
        Table {
            name: name.into(),
            ..self.clone()
        }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    /// `(name, dtype)` pairs in schema order.
    pub fn schema(&self) -> Vec<(String, DType)> {
        self.columns
            .iter()
            .map(|c| (c.name.clone(), c.dtype()))
            .collect()
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.column_index(name).is_some()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| MqlError::UnknownColumn(name.to_string()))
    }

    pub fn cell(&self, row: usize, column: &str) -> Result<Cell<'_>> {
        Ok(self.column(column)?.cell(row))
    }

    /// Projection onto `names`, in the given order.
    pub fn select_columns<S: AsRef<str>>(&self, names: &[S]) -> Result<Table> {
        let mut seen = HashSet::new();
        let mut columns = Vec::with_capacity(names.len());
        for name in names {
            let name = name.as_ref();
            let col = self.column(name)?;
            if !seen.insert(name) {
                return Err(MqlError::DuplicateColumn(name.to_string()));
            }
            columns.push(col.clone());
        }
        Ok(Table {
            name: self.name.clone(),
            columns,
            row_count: self.row_count,
        })
    }

    /// Rows at the given indices, in the given order. Indices may repeat.
    pub fn take_rows(&self, rows: &[usize]) -> Table {
        Table {
            name: self.name.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| Column {
                    name: c.name.clone(),
                    data: c.data.take(rows),
                })
                .collect(),
            row_count: rows.len(),
        }
    }

    /// Returns a copy with the named column swapped for `column`.
    pub fn replace_column(&self, name: &str, column: Column) -> Result<Table> {
        let idx = self
            .column_index(name)
            .ok_or_else(|| MqlError::UnknownColumn(name.to_string()))?;
        if column.len() != self.row_count {
            return Err(MqlError::Format(format!(
                "replacement for `{name}` has {} cells, expected {}",
                column.len(),
                self.row_count
            )));
        }
        let mut columns = self.columns.clone();
        columns[idx] = column;
        Table::new(self.name.clone(), columns)
    }

    /// Rows satisfying `predicate`, order preserved.
    pub fn apply_where(&self, predicate: &Predicate) -> Result<Table> {
        if predicate.is_empty() {
            return Ok(self.clone());
        }
        let keep = predicate.matching_rows(self)?;
        Ok(self.take_rows(&keep))
    }

    /// Indices of rows where every listed column is present.
    pub fn complete_rows<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let cols = names
            .iter()
            .map(|n| self.column(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..self.row_count)
            .filter(|&r| cols.iter().all(|c| !c.cell(r).is_missing()))
            .collect())
    }

    /// Full row as serialized tokens; used for whole-row comparisons.
    pub fn row_tokens(&self, row: usize) -> Vec<String> {
        self.columns.iter().map(|c| c.cell(row).token()).collect()
    }
}
