use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::data::Matrix;
use crate::error::{MqlError, Result};

/// Condition estimate above which OLS switches to the ridge fallback.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Slope penalty used by the fallback.
pub const FALLBACK_LAMBDA: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    #[serde(with = "crate::learn::decimal")]
    pub intercept: f64,
    #[serde(with = "crate::learn::decimal::vec")]
    pub coefficients: Vec<f64>,
    /// Penalty actually applied to the slopes.
    #[serde(with = "crate::learn::decimal")]
    pub lambda: f64,
    /// True when a singular Gram matrix forced the fallback penalty.
    pub fallback: bool,
}

impl LinearFit {
    pub fn predict_row(&self, x: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(x).map(|(b, v)| b * v).sum::<f64>()
    }
}

/// Least squares with intercept through the normal equations of `[1 | X]`.
///
/// `lambda` penalizes slopes only. With `lambda = 0` and a near-singular Gram
/// matrix the fit is redone with [`FALLBACK_LAMBDA`].
pub fn fit_ols(x: &Matrix, y: &[f64], lambda: f64) -> Result<LinearFit> {
    if x.rows == 0 || x.cols == 0 {
        return Err(MqlError::DegenerateDesign(format!(
            "{} rows, {} features",
            x.rows, x.cols
        )));
    }
    let p = x.cols + 1;
    let design = DMatrix::from_fn(x.rows, p, |i, j| if j == 0 { 1.0 } else { x.get(i, j - 1) });
    let target = DVector::from_column_slice(y);
    let gram = design.transpose() * &design;
    let rhs = design.transpose() * target;

    let (lambda, fallback) = if lambda == 0.0 && condition_estimate(&gram) > CONDITION_LIMIT {
        (FALLBACK_LAMBDA, true)
    } else {
        (lambda, false)
    };
    let mut g = gram;
    for j in 1..p {
        g[(j, j)] += lambda;
    }
    let beta = solve_refined(&g, &rhs)
        .ok_or_else(|| MqlError::DegenerateDesign("normal equations are singular".into()))?;
    Ok(LinearFit {
        intercept: beta[0],
        coefficients: beta.iter().skip(1).copied().collect(),
        lambda,
        fallback,
    })
}

/// Eigenvalue ratio of the Gram matrix after scaling it to unit diagonal.
fn condition_estimate(gram: &DMatrix<f64>) -> f64 {
    let d: Vec<f64> = (0..gram.nrows()).map(|i| gram[(i, i)]).collect();
    if d.iter().any(|&v| v <= 0.0) {
        return f64::INFINITY;
    }
    let scaled = DMatrix::from_fn(gram.nrows(), gram.ncols(), |i, j| {
        gram[(i, j)] / (d[i].sqrt() * d[j].sqrt())
    });
    let eig = scaled.symmetric_eigenvalues();
    let max = eig.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let min = eig.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Cholesky (or LU) solve followed by one step of iterative refinement.
fn solve_refined(g: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let solve = |b: &DVector<f64>| -> Option<DVector<f64>> {
        match g.clone().cholesky() {
            Some(c) => Some(c.solve(b)),
            None => g.clone().lu().solve(b),
        }
    };
    let beta = solve(rhs)?;
    let residual = rhs - g * &beta;
    let beta = match solve(&residual) {
        Some(delta) => beta + delta,
        None => beta,
    };
    beta.iter().all(|v| v.is_finite()).then_some(beta)
}
