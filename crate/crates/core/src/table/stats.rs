use std::collections::{BTreeMap, BTreeSet};

use super::{ColumnData, Table};
use crate::error::{MqlError, Result};

/// Summary statistics of one column.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStats {
    pub column: String,
    /// `None` for categorical or all-missing columns.
    pub median: Option<f64>,
    /// `None` for all-missing columns.
    pub mode: Option<String>,
    pub distinct: BTreeSet<String>,
    pub missing_count: usize,
    numeric: bool,
}

impl ColumnStats {
    pub fn require_median(&self) -> Result<f64> {
        if !self.numeric {
            return Err(MqlError::NotNumeric(self.column.clone()));
        }
        self.median
            .ok_or_else(|| MqlError::EmptyColumn(self.column.clone()))
    }

    pub fn require_mode(&self) -> Result<&str> {
        self.mode
            .as_deref()
            .ok_or_else(|| MqlError::EmptyColumn(self.column.clone()))
    }
}

pub fn column_stats(t: &Table, name: &str) -> Result<ColumnStats> {
    let col = t.column(name)?;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for cell in col.cells().filter(|c| !c.is_missing()) {
        *counts.entry(cell.token()).or_default() += 1;
    }
    // BTreeMap iterates lexicographically, so the first maximum wins ties.
    let mode = counts
        .iter()
        .fold(None::<(&String, usize)>, |best, (tok, &n)| match best {
            Some((_, m)) if m >= n => best,
            _ => Some((tok, n)),
        })
        .map(|(tok, _)| tok.clone());

    let median = match col.data() {
        ColumnData::Numeric(v) => median(v.iter().flatten().copied().collect()),
        ColumnData::Categorical(_) => None,
    };

    Ok(ColumnStats {
        column: name.to_string(),
        median,
        mode,
        distinct: counts.into_keys().collect(),
        missing_count: col.missing_count(),
        numeric: matches!(col.data(), ColumnData::Numeric(_)),
    })
}

/// Median with the mean-of-middle-pair rule for even counts.
pub(crate) fn median(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{read_csv, Column};

    fn numeric(cells: Vec<Option<f64>>) -> Table {
        Table::new("t", vec![Column::numeric("x", cells).unwrap()]).unwrap()
    }

    #[test]
    fn median_skips_missing() {
        let t = numeric(vec![Some(1.0), Some(2.0), None, Some(4.0)]);
        let s = column_stats(&t, "x").unwrap();
        assert_eq!(s.require_median().unwrap(), 2.0);
        assert_eq!(s.missing_count, 1);
    }

    #[test]
    fn median_even_count() {
        let t = numeric(vec![Some(1.0), Some(2.0), Some(3.0), Some(4.0)]);
        assert_eq!(column_stats(&t, "x").unwrap().median, Some(2.5));
    }

    #[test]
    fn mode_with_tie_break() {
        let t = read_csv("k\na\nb\na\n".as_bytes(), "t").unwrap();
        let s = column_stats(&t, "k").unwrap();
        assert_eq!(s.require_mode().unwrap(), "a");
        assert!(s.require_median().is_err());
        let t = read_csv("k\nb\na\nb\na\nc\n".as_bytes(), "t").unwrap();
        assert_eq!(column_stats(&t, "k").unwrap().mode.as_deref(), Some("a"));
        assert_eq!(column_stats(&t, "k").unwrap().distinct.len(), 3);
    }

    #[test]
    fn all_missing_is_empty_column() {
        let t = numeric(vec![None, None]);
        let s = column_stats(&t, "x").unwrap();
        assert!(matches!(s.require_median(), Err(MqlError::EmptyColumn(_))));
        assert!(matches!(s.require_mode(), Err(MqlError::EmptyColumn(_))));
        assert!(s.distinct.is_empty());
        assert!(matches!(
            column_stats(&t, "y"),
            Err(MqlError::UnknownColumn(_))
        ));
    }
}
