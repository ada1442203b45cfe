//! INSPECT actions: table in, table out. Each action sees the output of the
//! previous one.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{MqlError, Result};
use crate::syntax::{print_expr, Expr, InspectAction, WrangleAction};
use crate::table::stats::median;
use crate::table::{column_stats, Cell, Column, ColumnData, Table};

/// One applied action and its effect.
#[derive(Debug, Clone, PartialEq)]
pub struct WrangleStep {
    pub column: String,
    pub action: String,
    pub rows_in: usize,
    pub rows_out: usize,
    pub cells_changed: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct WrangleLog {
    pub table: String,
    pub steps: Vec<WrangleStep>,
}

impl WrangleLog {
    /// Plain-text rendering for the `.wrangle.log` file.
    pub fn render(&self) -> String {
        let mut out = format!("table: {}\n", self.table);
        if self.steps.is_empty() {
            out.push_str("no actions\n");
        }
        for (i, s) in self.steps.iter().enumerate() {
            let _ = writeln!(
                out,
                "{}. {} {}: rows {} -> {}, cells changed {}",
                i + 1,
                s.column,
                s.action,
                s.rows_in,
                s.rows_out,
                s.cells_changed
            );
        }
        out
    }
}

fn describe(a: &WrangleAction) -> String {
    match a {
        WrangleAction::Categorize(l) => format!("CATEGORIZE INTO {}", l.join(", ")),
        WrangleAction::Impute => "IMPUTE".into(),
        WrangleAction::Numerize(e) => format!("NUMERIZE AS {}", print_expr(e)),
        WrangleAction::Deduplicate => "DEDUPLICATE".into(),
    }
}

/// Applies `actions` in order. WHERE must already be applied to `input`.
pub fn inspect_execute(actions: &[InspectAction], input: &Table) -> Result<(Table, WrangleLog)> {
    let mut t = input.clone();
    let mut log = WrangleLog {
        table: input.name().to_string(),
        steps: Vec::new(),
    };
    for a in actions {
        let before = t.clone();
        t = match &a.action {
            WrangleAction::Categorize(labels) => categorize(&t, &a.column, labels)?,
            WrangleAction::Impute => impute(&t, &a.column)?,
            WrangleAction::Numerize(e) => numerize(&t, &a.column, e)?,
            WrangleAction::Deduplicate => deduplicate(&t, &a.column)?,
        };
        let cells_changed = if t.row_count() == before.row_count() {
            let (old, new) = (before.column(&a.column)?, t.column(&a.column)?);
            (0..t.row_count())
                .filter(|&r| old.cell(r) != new.cell(r))
                .count()
        } else {
            0
        };
        log.steps.push(WrangleStep {
            column: a.column.clone(),
            action: describe(&a.action),
            rows_in: before.row_count(),
            rows_out: t.row_count(),
            cells_changed,
        });
    }
    Ok((t, log))
}

/// Linear-interpolation quantile of sorted values, `q` in [0, 1].
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Equal-frequency binning into `labels`. The last bin is unbounded above.
pub fn categorize(t: &Table, col: &str, labels: &[String]) -> Result<Table> {
    let c = t.column(col)?;
    let cells = c
        .as_numeric()
        .ok_or_else(|| MqlError::NotNumeric(col.to_string()))?;
    let x = labels.len();
    let mut values: Vec<f64> = cells.iter().flatten().copied().collect();
    if x < 2 || values.len() < x {
        return Err(MqlError::TooFewValues {
            column: col.to_string(),
            have: values.len(),
            need: x.max(2),
        });
    }
    values.sort_by(f64::total_cmp);
    let edges: Vec<f64> = (1..x).map(|j| quantile(&values, j as f64 / x as f64)).collect();
    let binned = cells
        .iter()
        .map(|v| {
            v.map(|v| {
                let j = edges.iter().position(|&e| e >= v).unwrap_or(x - 1);
                labels[j].clone()
            })
        })
        .collect();
    t.replace_column(col, Column::categorical(col, binned))
}

/// Fills missing cells with the median (numeric) or mode (categorical).
pub fn impute(t: &Table, col: &str) -> Result<Table> {
    let c = t.column(col)?;
    if c.missing_count() == 0 {
        return Ok(t.clone());
    }
    let filled = match c.data() {
        ColumnData::Numeric(v) => {
            let m = median(v.iter().flatten().copied().collect())
                .ok_or_else(|| MqlError::EmptyColumn(col.to_string()))?;
            Column::numeric(col, v.iter().map(|x| Some(x.unwrap_or(m))).collect())?
        }
        ColumnData::Categorical(v) => {
            let stats = column_stats(t, col)?;
            let m = stats.require_mode()?;
            Column::categorical(
                col,
                v.iter()
                    .map(|x| Some(x.clone().unwrap_or_else(|| m.to_string())))
                    .collect(),
            )
        }
    };
    t.replace_column(col, filled)
}

/// Replaces each present cell with `e` evaluated at that cell. Text cells must
/// parse as numbers.
pub fn numerize(t: &Table, col: &str, e: &Expr) -> Result<Table> {
    if let Some(other) = e.columns().into_iter().find(|c| *c != col) {
        return Err(MqlError::Expression(format!(
            "NUMERIZE AS for `{col}` references `{other}`"
        )));
    }
    let c = t.column(col)?;
    let mut out = Vec::with_capacity(c.len());
    for (row, cell) in c.cells().enumerate() {
        let v = match cell {
            Cell::Missing => None,
            Cell::Number(v) => Some(v),
            Cell::Text(s) => Some(s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(
                || MqlError::NotNumeric(format!("{col}` row {}: `{s}", row + 1)),
            )?),
        };
        out.push(match v {
            None => None,
            Some(v) => Some(e.eval(v).map_err(|message| MqlError::Domain {
                row: row + 1,
                message: format!("`{col}` = {v}: {message}"),
            })?),
        });
    }
    t.replace_column(col, Column::numeric(col, out)?)
}

/// Drops repeated rows, comparing whole rows and keeping the first. `col` is
/// only checked for existence.
pub fn deduplicate(t: &Table, col: &str) -> Result<Table> {
    t.column(col)?;
    let mut seen = HashSet::new();
    let keep: Vec<usize> = (0..t.row_count())
        .filter(|&r| seen.insert(t.row_tokens(r)))
        .collect();
    if keep.len() == t.row_count() {
        return Ok(t.clone());
    }
    Ok(t.take_rows(&keep))
}
