use std::fmt;

use serde::{Deserialize, Serialize};

use super::data::{class_target, real_target, Matrix, Standardizer};
use super::forest::{fit_forest, forest_predict_class, forest_predict_real, ForestHyper};
use super::kmeans::{kmeans, nearest, silhouette, KMeansHyper};
use super::knn::{fit_knn, KnnFit, KnnTargets};
use super::linear::{fit_ols, LinearFit};
use super::metrics::MetricRecord;
use super::registry::Algorithm;
use super::tree::{fit_tree, Tree, TreeHyper, TreeTarget};
use crate::error::{MqlError, Result};
use crate::table::{stats::median, DType, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MlType {
    Pred,
    Class,
    Clus,
}

impl MlType {
    /// The MQL task keyword.
    pub fn keyword(self) -> &'static str {
        match self {
            MlType::Pred => "PREDICTION",
            MlType::Class => "CLASSIFICATION",
            MlType::Clus => "CLUSTER",
        }
    }
}

impl fmt::Display for MlType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MlType::Pred => "pred",
            MlType::Class => "class",
            MlType::Clus => "clus",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub dtype: DType,
}

/// Hyperparameters for every registry algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    #[serde(with = "crate::learn::decimal")]
    pub ridge_lambda: f64,
    pub tree: TreeHyper,
    pub forest: ForestHyper,
    pub knn_k: usize,
    pub kmeans_n_init: usize,
    pub kmeans_max_iter: usize,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper {
            ridge_lambda: 1.0,
            tree: TreeHyper::default(),
            forest: ForestHyper::default(),
            knn_k: 5,
            kmeans_n_init: KMeansHyper::default().n_init,
            kmeans_max_iter: KMeansHyper::default().max_iter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Params {
    Linear(LinearFit),
    Tree {
        tree: Tree,
    },
    Forest {
        trees: Vec<Tree>,
    },
    Knn(KnnFit),
    KMeans {
        standardizer: Standardizer,
        /// Standardized units.
        centroids: Matrix,
        #[serde(with = "crate::learn::decimal")]
        inertia: f64,
    },
}

/// A trained model and everything needed to reuse it.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub name: String,
    pub ml_type: MlType,
    pub algorithm: Algorithm,
    pub features: Vec<FeatureSpec>,
    /// Prediction target or class column.
    pub target: Option<String>,
    /// Sorted, so the lowest index is also the lexicographically smallest label.
    pub class_labels: Vec<String>,
    pub cluster_count: Option<usize>,
    pub params: Params,
    /// Per-feature training medians, used to fill missing cells under the impute policy.
    pub train_medians: Vec<f64>,
    pub train_metrics: MetricRecord,
    pub test_metrics: Option<MetricRecord>,
    pub seed: u64,
    pub hyper: Hyper,
    pub train_rows: usize,
    pub test_rows: usize,
    pub created_at: String,
}

/// Per-row model output.
#[derive(Debug, Clone, PartialEq)]
pub enum Outputs {
    Real(Vec<f64>),
    Class(Vec<String>),
    Cluster(Vec<usize>),
}

impl Outputs {
    pub fn len(&self) -> usize {
        match self {
            Outputs::Real(v) => v.len(),
            Outputs::Class(v) => v.len(),
            Outputs::Cluster(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Result-table column name for these outputs.
    pub fn column_name(&self) -> &'static str {
        match self {
            Outputs::Real(_) => "prediction",
            Outputs::Class(_) => "class",
            Outputs::Cluster(_) => "cluster",
        }
    }
}

/// What to train.
#[derive(Debug, Clone)]
pub struct TrainSpec {
    pub ml_type: MlType,
    pub algorithm: Algorithm,
    pub features: Vec<String>,
    pub target: Option<String>,
    pub class_labels: Vec<String>,
    pub k: Option<usize>,
    pub hyper: Hyper,
    pub seed: u64,
}

fn sorted_labels(labels: &[String]) -> Vec<String> {
    let mut l = labels.to_vec();
    l.sort();
    l.dedup();
    l
}

fn require_target(spec: &TrainSpec) -> Result<&str> {
    spec.target
        .as_deref()
        .ok_or_else(|| MqlError::SchemaMismatch(format!("{} needs a target column", spec.ml_type.keyword())))
}

/// Trains `spec.algorithm` on every row of `train` and records training metrics.
pub fn fit(spec: &TrainSpec, train: &Table) -> Result<Model> {
    if !spec.algorithm.supports(spec.ml_type) {
        return Err(MqlError::UnknownAlgorithm(format!(
            "{} does not support {}",
            spec.algorithm,
            spec.ml_type.keyword()
        )));
    }
    if spec.features.is_empty() || train.row_count() == 0 {
        return Err(MqlError::DegenerateDesign(format!(
            "{} rows, {} features",
            train.row_count(),
            spec.features.len()
        )));
    }
    let x = Matrix::from_table(train, &spec.features)?;
    let class_labels = if spec.ml_type == MlType::Class {
        sorted_labels(&spec.class_labels)
    } else {
        Vec::new()
    };
    let all: Vec<usize> = (0..x.rows).collect();
    let params = match spec.ml_type {
        MlType::Pred => {
            let y = real_target(train, require_target(spec)?)?;
            match spec.algorithm {
                Algorithm::LinearRegression => Params::Linear(fit_ols(&x, &y, 0.0)?),
                Algorithm::Ridge => Params::Linear(fit_ols(&x, &y, spec.hyper.ridge_lambda)?),
                Algorithm::DecisionTree => Params::Tree {
                    tree: fit_tree(&x, TreeTarget::Real(&y), &all, spec.hyper.tree, None),
                },
                Algorithm::RandomForest => Params::Forest {
                    trees: fit_forest(&x, TreeTarget::Real(&y), spec.hyper.forest, spec.seed),
                },
                Algorithm::Knn => Params::Knn(fit_knn(&x, KnnTargets::Real(y), 0, spec.hyper.knn_k)?),
                Algorithm::KMeans => unreachable!("checked by supports"),
            }
        }
        MlType::Class => {
            let y = class_target(train, require_target(spec)?, &class_labels)?;
            let n = class_labels.len();
            match spec.algorithm {
                Algorithm::DecisionTree => Params::Tree {
                    tree: fit_tree(&x, TreeTarget::Class(&y, n), &all, spec.hyper.tree, None),
                },
                Algorithm::RandomForest => Params::Forest {
                    trees: fit_forest(&x, TreeTarget::Class(&y, n), spec.hyper.forest, spec.seed),
                },
                Algorithm::Knn => Params::Knn(fit_knn(&x, KnnTargets::Class(y), n, spec.hyper.knn_k)?),
                _ => unreachable!("checked by supports"),
            }
        }
        MlType::Clus => {
            let k = spec
                .k
                .ok_or_else(|| MqlError::DegenerateDesign("CLUSTER OF needs k".into()))?;
            let standardizer = Standardizer::fit(&x);
            let z = standardizer.apply(&x);
            let hyper = KMeansHyper {
                n_init: spec.hyper.kmeans_n_init,
                max_iter: spec.hyper.kmeans_max_iter,
            };
            let run = kmeans(&z, k, spec.seed, hyper)?.best;
            Params::KMeans {
                standardizer,
                centroids: run.centroids,
                inertia: run.inertia,
            }
        }
    };
    let train_medians = (0..x.cols)
        .map(|j| median(x.column(j)).unwrap_or(0.0))
        .collect();
    let mut model = Model {
        name: String::new(),
        ml_type: spec.ml_type,
        algorithm: spec.algorithm,
        features: spec
            .features
            .iter()
            .map(|f| FeatureSpec {
                name: f.clone(),
                dtype: DType::Numeric,
            })
            .collect(),
        target: if spec.ml_type == MlType::Clus {
            None
        } else {
            spec.target.clone()
        },
        class_labels,
        cluster_count: (spec.ml_type == MlType::Clus).then_some(spec.k.unwrap_or(0)),
        params,
        train_medians,
        train_metrics: MetricRecord::clustering(0, 0.0),
        test_metrics: None,
        seed: spec.seed,
        hyper: spec.hyper,
        train_rows: train.row_count(),
        test_rows: 0,
        created_at: String::new(),
    };
    model.train_metrics = evaluate(&model, train)?;
    Ok(model)
}

impl Model {
    pub fn feature_names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name.clone()).collect()
    }

    /// True when the linear solve needed the ridge fallback.
    pub fn ridge_fallback(&self) -> bool {
        matches!(&self.params, Params::Linear(l) if l.fallback)
    }

    /// The metric record compared against an accuracy threshold: test if present, else train.
    pub fn reference_metrics(&self) -> &MetricRecord {
        self.test_metrics.as_ref().unwrap_or(&self.train_metrics)
    }

    /// Centroids in the original feature units.
    pub fn centroids(&self) -> Option<Vec<Vec<f64>>> {
        match &self.params {
            Params::KMeans {
                standardizer,
                centroids,
                ..
            } => Some(
                (0..centroids.rows)
                    .map(|c| standardizer.invert_row(centroids.row(c)))
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Feature matrix for `rows`, checking names and dtypes against the schema.
    pub fn design(&self, rows: &Table) -> Result<Matrix> {
        for f in &self.features {
            match rows.column(&f.name) {
                Ok(c) if c.dtype() == f.dtype => {}
                Ok(c) => {
                    return Err(MqlError::SchemaMismatch(format!(
                        "feature `{}` is {} in the input, model expects {}",
                        f.name,
                        c.dtype(),
                        f.dtype
                    )))
                }
                Err(_) => {
                    return Err(MqlError::SchemaMismatch(format!(
                        "input has no column `{}` required by model `{}`",
                        f.name, self.name
                    )))
                }
            }
        }
        Matrix::from_table(rows, &self.feature_names())
    }

    fn predict_real_row(&self, x: &[f64]) -> f64 {
        match &self.params {
            Params::Linear(l) => l.predict_row(x),
            Params::Tree { tree } => tree.predict_row(x),
            Params::Forest { trees } => forest_predict_real(trees, x),
            Params::Knn(k) => k.predict_real(x),
            Params::KMeans { .. } => unreachable!("k-means has no real output"),
        }
    }

    fn predict_class_row(&self, x: &[f64]) -> usize {
        match &self.params {
            Params::Tree { tree } => tree.predict_row(x) as usize,
            Params::Forest { trees } => forest_predict_class(trees, x, self.class_labels.len()),
            Params::Knn(k) => k.predict_class(x),
            _ => unreachable!("not a classifier"),
        }
    }

    fn cluster_rows(&self, x: &Matrix) -> (Matrix, Vec<usize>) {
        let Params::KMeans {
            standardizer,
            centroids,
            ..
        } = &self.params
        else {
            unreachable!("not a clustering model")
        };
        let z = standardizer.apply(x);
        let a = (0..z.rows).map(|i| nearest(centroids, z.row(i)).0).collect();
        (z, a)
    }

    fn class_indices(&self, x: &Matrix) -> Vec<usize> {
        (0..x.rows).map(|i| self.predict_class_row(x.row(i))).collect()
    }

    /// Per-row predictions, labels or cluster ids, in row order.
    pub fn predict(&self, rows: &Table) -> Result<Outputs> {
        let x = self.design(rows)?;
        Ok(match self.ml_type {
            MlType::Pred => Outputs::Real((0..x.rows).map(|i| self.predict_real_row(x.row(i))).collect()),
            MlType::Class => Outputs::Class(
                self.class_indices(&x)
                    .into_iter()
                    .map(|c| self.class_labels[c].clone())
                    .collect(),
            ),
            MlType::Clus => Outputs::Cluster(self.cluster_rows(&x).1),
        })
    }
}

/// Scores `m` on `test`, which must carry the target column for supervised models.
pub fn evaluate(m: &Model, test: &Table) -> Result<MetricRecord> {
    if test.row_count() == 0 {
        return Err(MqlError::EmptyTestSet);
    }
    let x = m.design(test)?;
    Ok(match m.ml_type {
        MlType::Pred => {
            let y = real_target(test, m.target.as_deref().unwrap_or_default())?;
            let p: Vec<f64> = (0..x.rows).map(|i| m.predict_real_row(x.row(i))).collect();
            MetricRecord::regression(&y, &p)
        }
        MlType::Class => {
            let y = class_target(test, m.target.as_deref().unwrap_or_default(), &m.class_labels)?;
            MetricRecord::classification(&y, &m.class_indices(&x))
        }
        MlType::Clus => {
            let (z, a) = m.cluster_rows(&x);
            MetricRecord::clustering(x.rows, silhouette(&z, &a))
        }
    })
}

/// Ordinary least squares (`ridge = 0`) or ridge regression on table columns.
pub fn fit_linear(train: &Table, target: &str, features: &[String], ridge: f64, seed: u64) -> Result<Model> {
    let hyper = Hyper {
        ridge_lambda: ridge,
        ..Hyper::default()
    };
    let algorithm = if ridge > 0.0 {
        Algorithm::Ridge
    } else {
        Algorithm::LinearRegression
    };
    fit(&supervised(MlType::Pred, algorithm, target, features, &[], hyper, seed), train)
}

fn supervised(
    ml_type: MlType,
    algorithm: Algorithm,
    target: &str,
    features: &[String],
    labels: &[String],
    hyper: Hyper,
    seed: u64,
) -> TrainSpec {
    TrainSpec {
        ml_type,
        algorithm,
        features: features.to_vec(),
        target: Some(target.to_string()),
        class_labels: labels.to_vec(),
        k: None,
        hyper,
        seed,
    }
}

/// k-means on table columns; features are standardized internally.
pub fn fit_kmeans(train: &Table, features: &[String], k: usize, seed: u64) -> Result<Model> {
    fit(
        &TrainSpec {
            ml_type: MlType::Clus,
            algorithm: Algorithm::KMeans,
            features: features.to_vec(),
            target: None,
            class_labels: Vec::new(),
            k: Some(k),
            hyper: Hyper::default(),
            seed,
        },
        train,
    )
}
