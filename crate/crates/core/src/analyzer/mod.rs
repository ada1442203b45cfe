//! Statement descriptors and pre-execution checks.
//!
//! [`gather`] turns a parsed statement into a [`Delta`]; [`validate`] checks a
//! delta against the tables and models a [`Catalog`] can see.

mod diagnostic;
mod validate;

pub use diagnostic::{Code, Diagnostic, Severity};
pub use validate::{infer_class_column, resolve_features, validate, Catalog};

use crate::error::{MqlError, Result};
use crate::learn::MlType;
use crate::syntax::{
    FeatureList, InspectAction, IntExpr, ModelRef, Statement, Supervision, TaskHead,
};
use crate::table::Predicate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StType {
    Gen,
    Con,
    Ins,
}

/// How a statement obtains its model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelMode {
    /// `USING MODEL name`
    Stored,
    /// `ALGORITHM name`
    Custom,
    /// Registry default for the task.
    Default,
    /// No model or algorithm, but an accuracy threshold: sweep the registry.
    Best,
}

/// Descriptor of one statement. INSPECT statements carry `ml_type = None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Delta {
    pub st_type: StType,
    pub model: ModelMode,
    pub ml_type: Option<MlType>,
    pub mod_name: Option<String>,
    /// Name a CONSTRUCT persists under.
    pub construct_name: Option<String>,
    pub features: Option<FeatureList>,
    pub display: bool,
    pub labels: Vec<String>,
    pub alg_name: Option<String>,
    /// Threshold as written.
    pub accuracy_raw: Option<f64>,
    /// Threshold scaled into (0, 1]; `None` if absent or out of range.
    pub accuracy: Option<f64>,
    pub target: Option<String>,
    pub class_labels: Vec<String>,
    pub k_expr: Option<IntExpr>,
    pub over_table: Option<String>,
    pub train_n: Option<IntExpr>,
    pub test_m: Option<IntExpr>,
    pub supervision: Option<Supervision>,
    pub from_tables: Vec<String>,
    pub filter: Option<Predicate>,
    pub actions: Vec<InspectAction>,
}

impl Delta {
    pub fn has_label(&self) -> bool {
        !self.labels.is_empty()
    }

    /// The single FROM table, if any.
    pub fn from_table(&self) -> Option<&str> {
        self.from_tables.first().map(String::as_str)
    }
}

/// A threshold mapped into (0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub value: f64,
    /// True when the input was a percentage in (1, 100].
    pub rescaled: bool,
}

/// `p <= 1` is a fraction; `1 < p <= 100` is a percentage.
pub fn normalize_accuracy(p: f64) -> Result<Accuracy> {
    if !(p > 0.0 && p <= 100.0) {
        Err(MqlError::Range(p))
    } else if p <= 1.0 {
        Ok(Accuracy {
            value: p,
            rescaled: false,
        })
    } else {
        Ok(Accuracy {
            value: p / 100.0,
            rescaled: true,
        })
    }
}

fn task_fields(t: &TaskHead) -> (MlType, Option<String>, Vec<String>, Option<IntExpr>) {
    match t {
        TaskHead::Prediction { target } => (MlType::Pred, Some(target.clone()), vec![], None),
        TaskHead::Classification { labels } => (MlType::Class, None, labels.clone(), None),
        TaskHead::Cluster { k } => (MlType::Clus, None, vec![], Some(k.clone())),
    }
}

fn mode(stored: bool, algorithm: bool, accuracy: bool) -> ModelMode {
    match (stored, algorithm, accuracy) {
        (true, _, _) => ModelMode::Stored,
        (false, true, _) => ModelMode::Custom,
        (false, false, true) => ModelMode::Best,
        (false, false, false) => ModelMode::Default,
    }
}

/// Total on parsed statements.
pub fn gather(s: &Statement) -> Delta {
    let base = Delta {
        st_type: StType::Ins,
        model: ModelMode::Default,
        ml_type: None,
        mod_name: None,
        construct_name: None,
        features: None,
        display: false,
        labels: vec![],
        alg_name: None,
        accuracy_raw: None,
        accuracy: None,
        target: None,
        class_labels: vec![],
        k_expr: None,
        over_table: None,
        train_n: None,
        test_m: None,
        supervision: None,
        from_tables: vec![],
        filter: None,
        actions: vec![],
    };
    let scaled = |p: Option<f64>| p.and_then(|p| normalize_accuracy(p).ok()).map(|a| a.value);
    match s {
        Statement::Generate(g) => {
            let (ml, target, class_labels, k_expr) = task_fields(&g.task);
            let (mod_name, alg_name) = match &g.model_ref {
                ModelRef::None => (None, None),
                ModelRef::Stored(m) => (Some(m.clone()), None),
                ModelRef::Algorithm(a) => (None, Some(a.clone())),
            };
            Delta {
                st_type: StType::Gen,
                model: mode(mod_name.is_some(), alg_name.is_some(), g.accuracy.is_some()),
                ml_type: Some(ml),
                mod_name,
                features: g.features.clone(),
                display: g.display,
                labels: g.labels.clone(),
                alg_name,
                accuracy_raw: g.accuracy,
                accuracy: scaled(g.accuracy),
                target,
                class_labels,
                k_expr,
                over_table: g.over.clone(),
                from_tables: g.from.clone(),
                filter: g.filter.clone(),
                ..base
            }
        }
        Statement::Construct(c) => {
            let (ml, target, class_labels, k_expr) = task_fields(&c.task);
            Delta {
                st_type: StType::Con,
                model: mode(false, c.algorithm.is_some(), c.accuracy.is_some()),
                ml_type: Some(ml),
                construct_name: Some(c.model_name.clone()),
                features: Some(c.features.clone()),
                alg_name: c.algorithm.clone(),
                accuracy_raw: c.accuracy,
                accuracy: scaled(c.accuracy),
                target,
                class_labels,
                k_expr,
                train_n: Some(c.train_n.clone()),
                test_m: Some(c.test_m.clone()),
                supervision: c.supervision,
                from_tables: c.from.clone(),
                filter: c.filter.clone(),
                ..base
            }
        }
        Statement::Inspect(i) => Delta {
            from_tables: i.from.clone(),
            filter: i.filter.clone(),
            actions: i.actions.clone(),
            ..base
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_statement;

    fn delta(text: &str) -> Delta {
        gather(&parse_statement(text).unwrap())
    }

    #[test]
    fn fig1_descriptor() {
        let d = delta(
            "GENERATE DISPLAY OF PREDICTION MEDV OVER homesNew LABEL HomeNo \
             FEATURES CRIM, ZN, NOX, DIS, TAX, PTRATIO FROM bostonHomes",
        );
        assert_eq!(d.st_type, StType::Gen);
        assert_eq!(d.model, ModelMode::Default);
        assert_eq!(d.ml_type, Some(MlType::Pred));
        assert!(d.display && d.has_label());
        assert_eq!(d.labels, ["HomeNo"]);
        assert_eq!(
            d.features,
            Some(FeatureList::Columns(
                ["CRIM", "ZN", "NOX", "DIS", "TAX", "PTRATIO"].map(String::from).to_vec()
            ))
        );
    }

    #[test]
    fn custom_mode_with_percentage() {
        let d = delta(
            "GENERATE DISPLAY OF PREDICTION epsilon OVER TestData USING ALGORITHM LinearRegression \
             WITH MODEL ACCURACY 80 FEATURES * FROM DyeData",
        );
        assert_eq!(d.model, ModelMode::Custom);
        assert_eq!(d.alg_name.as_deref(), Some("LinearRegression"));
        assert_eq!(d.accuracy, Some(0.8));
    }

    #[test]
    fn best_mode() {
        let d = delta("GENERATE PREDICTION y OVER t WITH MODEL ACCURACY 0.9 FEATURES x FROM d");
        assert_eq!(d.model, ModelMode::Best);
        assert_eq!(d.accuracy, Some(0.9));
        let d = delta("CONSTRUCT m FOR PREDICTION y WITH MODEL ACCURACY 0.9 TRAIN ON 5 TEST ON 1 FEATURES x FROM d");
        assert_eq!(d.model, ModelMode::Best);
    }

    #[test]
    fn stored_mode() {
        let d = delta("GENERATE PREDICTION epsilon OVER TestData USING MODEL RandonForest");
        assert_eq!(d.model, ModelMode::Stored);
        assert_eq!(d.mod_name.as_deref(), Some("RandonForest"));
        assert!(d.from_tables.is_empty());
    }

    #[test]
    fn clause_order_does_not_matter() {
        let a = delta("GENERATE PREDICTION f OVER inputData LABEL id FEATURES f1, f2 FROM dataSet");
        let b = delta("GENERATE PREDICTION f OVER inputData FEATURES f1, f2 LABEL id FROM dataSet");
        assert_eq!(a, b);
    }

    #[test]
    fn accuracy_scaling() {
        assert_eq!(normalize_accuracy(80.0).unwrap(), Accuracy { value: 0.8, rescaled: true });
        assert_eq!(normalize_accuracy(0.5).unwrap(), Accuracy { value: 0.5, rescaled: false });
        assert_eq!(normalize_accuracy(1.0).unwrap().value, 1.0);
        assert_eq!(normalize_accuracy(100.0).unwrap().value, 1.0);
        for bad in [0.0, -3.0, 100.5] {
            assert!(matches!(normalize_accuracy(bad), Err(MqlError::Range(_))));
        }
    }
}
