use crate::analyzer::{infer_class_column, resolve_features, Code, Delta, ModelMode};
use crate::error::{MqlError, Result};
use crate::learn::data::label_index;
use crate::learn::{default_split_sizes, evaluate, fit, train_test_split, Algorithm, Hyper, MlType, Model, TrainSpec};
use crate::store::Manifest;
use crate::syntax::FeatureList;
use crate::table::Table;

use super::{Output, Report, Session};

/// Training input after WHERE, feature resolution and row filtering.
pub(crate) struct Prepared {
    pub features: Vec<String>,
    /// Prediction target or class column.
    pub target: Option<String>,
    pub data: Table,
    /// Rows after WHERE; the value of `COUNT(*)`.
    pub count_all: usize,
}

pub(crate) struct Trained {
    pub model: Model,
    pub train: Table,
    /// Held-out rows; `None` when the test part is empty.
    pub test: Option<Table>,
}

impl Session {
    pub(crate) fn prepare(&self, d: &Delta, i: usize, report: &mut Report) -> Result<Prepared> {
        let ml = d.ml_type.expect("task statement");
        let from = self.resolve_table(d.from_table().unwrap_or_default())?;
        let filtered = match &d.filter {
            Some(p) => from.apply_where(p)?,
            None => (*from).clone(),
        };
        let listed = match &d.features {
            Some(FeatureList::Columns(c)) => Some(c.as_slice()),
            _ => None,
        };
        let class_column = match ml {
            MlType::Class => Some(infer_class_column(&from, &d.class_labels, listed, &d.labels)?),
            _ => None,
        };
        let features = resolve_features(d, &from, class_column.as_deref())?;
        let target = match ml {
            MlType::Pred => d.target.clone(),
            MlType::Class => class_column,
            MlType::Clus => None,
        };
        let mut needed = features.clone();
        needed.extend(target.iter().cloned());
        let mut keep = filtered.complete_rows(&needed)?;
        let missing = filtered.row_count() - keep.len();
        if let (MlType::Class, Some(t)) = (ml, &target) {
            let col = filtered.column(t)?;
            keep.retain(|&r| label_index(col.cell(r), &d.class_labels).is_some());
        }
        let other = filtered.row_count() - missing - keep.len();
        if missing > 0 {
            report.warn(
                i,
                Code::RowsDropped,
                Some("FEATURES"),
                format!("dropped {missing} of {} rows with missing features or target", filtered.row_count()),
            );
        }
        if other > 0 {
            report.warn(
                i,
                Code::RowsDropped,
                Some("CLASSIFICATION"),
                format!("dropped {other} rows whose class is not among the listed labels"),
            );
        }
        let count_all = filtered.row_count();
        let data = if keep.len() == count_all { filtered } else { filtered.take_rows(&keep) };
        Ok(Prepared {
            features,
            target,
            data,
            count_all,
        })
    }

    /// Trains per the model mode. Transient clustering trains on every row.
    pub(crate) fn train(&self, d: &Delta, prep: &Prepared, transient: bool, i: usize, report: &mut Report) -> Result<Trained> {
        let ml = d.ml_type.expect("task statement");
        let (train, test) = if ml == MlType::Clus && transient {
            (prep.data.clone(), None)
        } else {
            let (n, m) = match (&d.train_n, &d.test_m) {
                (Some(n), Some(m)) => (n.eval_count(prep.count_all)?, m.eval_count(prep.count_all)?),
                _ => default_split_sizes(prep.data.row_count()),
            };
            let split = train_test_split(&prep.data, n, m, self.seed)?;
            if let Some(asked) = split.clamped_from {
                report.warn(
                    i,
                    Code::TestClamped,
                    Some("TEST ON"),
                    format!("TEST ON {asked} exceeds the rows left after training; testing on {}", split.test.row_count()),
                );
            }
            let test = (split.test.row_count() > 0).then_some(split.test);
            (split.train, test)
        };
        let k = d.k_expr.as_ref().map(|k| k.eval_count(prep.count_all)).transpose()?;
        let algorithms = match d.model {
            ModelMode::Custom => {
                let name = d.alg_name.as_deref().unwrap_or_default();
                vec![Algorithm::lookup(name).ok_or_else(|| MqlError::UnknownAlgorithm(name.to_string()))?]
            }
            ModelMode::Default => vec![Algorithm::default_for(ml)],
            ModelMode::Best => Algorithm::candidates(ml),
            ModelMode::Stored => unreachable!("stored models are not trained"),
        };

        let mut fitted = Vec::with_capacity(algorithms.len());
        for algorithm in algorithms {
            let spec = TrainSpec {
                ml_type: ml,
                algorithm,
                features: prep.features.clone(),
                target: prep.target.clone(),
                class_labels: d.class_labels.clone(),
                k,
                hyper: Hyper::default(),
                seed: self.seed,
            };
            let mut m = fit(&spec, &train)?;
            if let Some(t) = &test {
                m.test_metrics = Some(evaluate(&m, t)?);
                m.test_rows = t.row_count();
            }
            fitted.push(m);
        }
        let score = |m: &Model| m.reference_metrics().normalized_score;
        let mut best = 0;
        for (j, m) in fitted.iter().enumerate() {
            if score(m) > score(&fitted[best]) {
                best = j;
            }
        }
        let scores: Vec<(String, f64)> = fitted.iter().map(|m| (m.algorithm.to_string(), score(m))).collect();
        let mut model = fitted.swap_remove(best);
        if d.model == ModelMode::Best {
            report.outputs.push(Output::Sweep {
                statement: i,
                scores: scores.clone(),
            });
        }
        if let Some(p) = d.accuracy {
            let s = score(&model);
            if s < p {
                return Err(if d.model == ModelMode::Best {
                    MqlError::BestBelowThreshold { threshold: p, scores }
                } else {
                    MqlError::AccuracyBelowThreshold {
                        model: model.algorithm.to_string(),
                        score: s,
                        threshold: p,
                    }
                });
            }
        }
        if model.ridge_fallback() {
            report.warn(
                i,
                Code::DegenerateDesign,
                Some("FEATURES"),
                "design matrix is ill-conditioned; fitted with a small ridge penalty".into(),
            );
        }
        model.name = match &d.construct_name {
            Some(n) => n.clone(),
            None => format!("transient-{}", model.algorithm),
        };
        model.created_at = self.clock.now();
        Ok(Trained { model, train, test })
    }

    pub(crate) fn exec_construct(&mut self, d: &Delta, i: usize, report: &mut Report) -> Result<()> {
        let prep = self.prepare(d, i, report)?;
        let trained = self.train(d, &prep, false, i, report)?;
        let name = &trained.model.name;
        if self.store.contains(name) {
            report.warn(i, Code::NameCollision, Some("CONSTRUCT"), format!("replacing stored model `{name}`"));
        }
        let dir = self.store.save(&trained.model, true)?;
        report.artifacts.push(dir);
        report.outputs.push(Output::Model {
            statement: i,
            manifest: Manifest::of(&trained.model),
        });
        Ok(())
    }
}
