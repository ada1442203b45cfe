use serde::{Deserialize, Serialize};

use super::model::MlType;

/// Evaluation of a model on one set of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub rows: usize,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::learn::decimal::option")]
    pub mse: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::learn::decimal::option")]
    pub r2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::learn::decimal::option")]
    pub accuracy_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::learn::decimal::option")]
    pub silhouette: Option<f64>,
    /// The value compared against WITH MODEL ACCURACY.
    #[serde(with = "crate::learn::decimal")]
    pub normalized_score: f64,
}

impl MetricRecord {
    pub fn regression(actual: &[f64], predicted: &[f64]) -> Self {
        let (mse, r2) = (mse(actual, predicted), r2(actual, predicted));
        MetricRecord {
            rows: actual.len(),
            mse: Some(mse),
            r2: Some(r2),
            accuracy_fraction: None,
            silhouette: None,
            normalized_score: normalized_score(MlType::Pred, r2),
        }
    }

    pub fn classification(actual: &[usize], predicted: &[usize]) -> Self {
        let hits = actual.iter().zip(predicted).filter(|(a, p)| a == p).count();
        let acc = if actual.is_empty() {
            0.0
        } else {
            hits as f64 / actual.len() as f64
        };
        MetricRecord {
            rows: actual.len(),
            mse: None,
            r2: None,
            accuracy_fraction: Some(acc),
            silhouette: None,
            normalized_score: normalized_score(MlType::Class, acc),
        }
    }

    pub fn clustering(rows: usize, silhouette: f64) -> Self {
        MetricRecord {
            rows,
            mse: None,
            r2: None,
            accuracy_fraction: None,
            silhouette: Some(silhouette),
            normalized_score: normalized_score(MlType::Clus, silhouette),
        }
    }
}

/// `max(0, r2)`, accuracy, or `(silhouette + 1) / 2`.
pub fn normalized_score(ml: MlType, raw: f64) -> f64 {
    match ml {
        MlType::Pred => raw.max(0.0),
        MlType::Class => raw,
        MlType::Clus => (raw + 1.0) / 2.0,
    }
}

pub fn mse(actual: &[f64], predicted: &[f64]) -> f64 {
    if actual.is_empty() {
        return 0.0;
    }
    actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum::<f64>()
        / actual.len() as f64
}

/// `1 - SSres/SStot`; a constant actual gives 1 for a perfect fit and 0 otherwise.
pub fn r2(actual: &[f64], predicted: &[f64]) -> f64 {
    if actual.is_empty() {
        return 0.0;
    }
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let ss_tot: f64 = actual.iter().map(|a| (a - mean) * (a - mean)).sum();
    let ss_res: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p) * (a - p)).sum();
    if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    }
}
