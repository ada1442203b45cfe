use serde::{Deserialize, Serialize};

use crate::error::{MqlError, Result};
use crate::table::{Cell, Table};

/// Dense row-major matrix of finite values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    #[serde(with = "crate::learn::decimal::vec")]
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix shape");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Matrix::new(rows.len(), cols, data)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Extracts `features` in order. Every cell must be a present number.
    pub fn from_table<S: AsRef<str>>(t: &Table, features: &[S]) -> Result<Self> {
        let cols = features
            .iter()
            .map(|f| {
                let c = t.column(f.as_ref())?;
                c.as_numeric()
                    .ok_or_else(|| MqlError::NotNumeric(f.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut data = Vec::with_capacity(t.row_count() * cols.len());
        for r in 0..t.row_count() {
            for (c, name) in cols.iter().zip(features) {
                data.push(c[r].ok_or_else(|| MqlError::Domain {
                    row: r + 1,
                    message: format!("missing value in feature `{}`", name.as_ref()),
                })?);
            }
        }
        Ok(Matrix::new(t.row_count(), cols.len(), data))
    }
}

/// Squared Euclidean distance.
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Per-feature centering and scaling. A zero spread scales by 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    #[serde(with = "crate::learn::decimal::vec")]
    pub means: Vec<f64>,
    #[serde(with = "crate::learn::decimal::vec")]
    pub scales: Vec<f64>,
}

impl Standardizer {
    /// Population mean and standard deviation per column.
    pub fn fit(x: &Matrix) -> Self {
        let n = x.rows.max(1) as f64;
        let mut means = vec![0.0; x.cols];
        let mut scales = vec![0.0; x.cols];
        for j in 0..x.cols {
            let col = x.column(j);
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            means[j] = mean;
            scales[j] = if var > 0.0 { var.sqrt() } else { 1.0 };
        }
        Standardizer { means, scales }
    }

    pub fn apply(&self, x: &Matrix) -> Matrix {
        let mut data = x.data.clone();
        for row in data.chunks_mut(x.cols.max(1)) {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (*v - self.means[j]) / self.scales[j];
            }
        }
        Matrix::new(x.rows, x.cols, data)
    }

    pub fn invert_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, v)| v * self.scales[j] + self.means[j])
            .collect()
    }
}

/// Position of `cell` in `labels`. Numeric cells also match labels that parse to the same value.
pub fn label_index(cell: Cell<'_>, labels: &[String]) -> Option<usize> {
    match cell {
        Cell::Missing => None,
        Cell::Text(s) => labels.iter().position(|l| l == s),
        Cell::Number(v) => labels
            .iter()
            .position(|l| l.trim().parse::<f64>().is_ok_and(|p| p == v)),
    }
}

/// Numeric target values; every cell must be present.
pub fn real_target(t: &Table, target: &str) -> Result<Vec<f64>> {
    let col = t.column(target)?;
    let values = col
        .as_numeric()
        .ok_or_else(|| MqlError::NotNumeric(target.to_string()))?;
    values
        .iter()
        .enumerate()
        .map(|(r, v)| {
            v.ok_or_else(|| MqlError::Domain {
                row: r + 1,
                message: format!("missing target `{target}`"),
            })
        })
        .collect()
}

/// Class indices into `labels`; every cell must be one of the labels.
pub fn class_target(t: &Table, column: &str, labels: &[String]) -> Result<Vec<usize>> {
    let col = t.column(column)?;
    (0..t.row_count())
        .map(|r| {
            label_index(col.cell(r), labels).ok_or_else(|| MqlError::Domain {
                row: r + 1,
                message: format!(
                    "`{column}` value `{}` is not one of the class labels",
                    col.cell(r).token()
                ),
            })
        })
        .collect()
}
