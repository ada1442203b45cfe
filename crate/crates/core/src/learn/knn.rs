use serde::{Deserialize, Serialize};

use super::data::{dist2, Matrix, Standardizer};
use crate::error::{MqlError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "lowercase")]
pub enum KnnTargets {
    Real(#[serde(with = "crate::learn::decimal::vec")] Vec<f64>),
    Class(Vec<usize>),
}

/// Stored neighbors, in standardized units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnFit {
    pub k: usize,
    pub standardizer: Standardizer,
    pub points: Matrix,
    pub targets: KnnTargets,
    pub n_classes: usize,
}

pub fn fit_knn(x: &Matrix, targets: KnnTargets, n_classes: usize, k: usize) -> Result<KnnFit> {
    if k == 0 {
        return Err(MqlError::DegenerateDesign("k must be at least 1".into()));
    }
    if k > x.rows {
        return Err(MqlError::KTooLarge { k, rows: x.rows });
    }
    let standardizer = Standardizer::fit(x);
    Ok(KnnFit {
        k,
        points: standardizer.apply(x),
        standardizer,
        targets,
        n_classes,
    })
}

impl KnnFit {
    /// The `k` nearest stored rows, ordered by distance then row index.
    fn neighbors(&self, raw: &[f64]) -> Vec<usize> {
        let q: Vec<f64> = raw
            .iter()
            .enumerate()
            .map(|(j, v)| (v - self.standardizer.means[j]) / self.standardizer.scales[j])
            .collect();
        let mut d: Vec<(f64, usize)> = (0..self.points.rows)
            .map(|i| (dist2(self.points.row(i), &q), i))
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        d.into_iter().take(self.k).map(|(_, i)| i).collect()
    }

    pub fn predict_real(&self, raw: &[f64]) -> f64 {
        let KnnTargets::Real(y) = &self.targets else {
            unreachable!("regression predict on a classifier")
        };
        let n = self.neighbors(raw);
        n.iter().map(|&i| y[i]).sum::<f64>() / n.len() as f64
    }

    /// Majority vote; a tie goes to the tied class whose member ranks nearest.
    pub fn predict_class(&self, raw: &[f64]) -> usize {
        let KnnTargets::Class(y) = &self.targets else {
            unreachable!("class predict on a regressor")
        };
        let n = self.neighbors(raw);
        let mut counts = vec![0usize; self.n_classes];
        for &i in &n {
            counts[y[i]] += 1;
        }
        let top = counts.iter().copied().max().unwrap_or(0);
        n.iter()
            .map(|&i| y[i])
            .find(|&c| counts[c] == top)
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k1_returns_own_target() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![5.0]]);
        let fit = fit_knn(&x, KnnTargets::Real(vec![10.0, 20.0, 30.0]), 0, 1).unwrap();
        for (i, want) in [10.0, 20.0, 30.0].iter().enumerate() {
            assert_eq!(fit.predict_real(x.row(i)), *want);
        }
    }

    #[test]
    fn equidistant_tie_goes_to_lower_row() {
        let x = Matrix::from_rows(&[vec![-1.0], vec![1.0]]);
        let fit = fit_knn(&x, KnnTargets::Class(vec![1, 0]), 2, 2).unwrap();
        assert_eq!(fit.predict_class(&[0.0]), 1);
        let fit = fit_knn(&x, KnnTargets::Class(vec![0, 1]), 2, 2).unwrap();
        assert_eq!(fit.predict_class(&[0.0]), 0);
    }

    #[test]
    fn k_equal_to_rows_is_global_mean() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![5.0], vec![9.0]]);
        let fit = fit_knn(&x, KnnTargets::Real(vec![1.0, 2.0, 3.0, 6.0]), 0, 4).unwrap();
        assert_eq!(fit.predict_real(&[100.0]), 3.0);
        let fit = fit_knn(&x, KnnTargets::Class(vec![0, 1, 1, 0]), 2, 4).unwrap();
        // Two-two tie: nearest neighbor of 100 is row 3 (class 0).
        assert_eq!(fit.predict_class(&[100.0]), 0);
    }

    #[test]
    fn k_too_large() {
        let x = Matrix::from_rows(&[vec![0.0]]);
        assert!(matches!(
            fit_knn(&x, KnnTargets::Real(vec![1.0]), 0, 2),
            Err(MqlError::KTooLarge { k: 2, rows: 1 })
        ));
    }
}
