use std::collections::HashSet;
use std::sync::Arc;

use super::diagnostic::{Code, Diagnostic};
use super::{normalize_accuracy, Delta, ModelMode, StType};
use crate::error::{MqlError, Result};
use crate::learn::data::label_index;
use crate::learn::{Algorithm, MlType};
use crate::store::{validate_name, Manifest};
use crate::syntax::{FeatureList, Supervision, WrangleAction};
use crate::table::{DType, Table};

/// Name resolution for tables and stored models.
pub trait Catalog {
    fn table(&self, name: &str) -> Result<Arc<Table>>;
    fn manifest(&self, name: &str) -> Result<Manifest>;
}

/// The class column for `labels`.
///
/// Listed features are searched first, so naming the class column in FEATURES
/// disambiguates. Otherwise every column except `exclude` is a candidate.
pub fn infer_class_column(
    t: &Table,
    labels: &[String],
    listed: Option<&[String]>,
    exclude: &[String],
) -> Result<String> {
    let holds_all = |name: &str| -> bool {
        let Ok(col) = t.column(name) else { return false };
        labels.iter().all(|l| {
            let one = std::slice::from_ref(l);
            col.cells().any(|c| label_index(c, one).is_some())
        })
    };
    if let Some(listed) = listed {
        let hits: Vec<String> = listed.iter().filter(|f| holds_all(f)).cloned().collect();
        match hits.len() {
            0 => {}
            1 => return Ok(hits.into_iter().next().unwrap_or_default()),
            _ => return Err(MqlError::AmbiguousTarget(hits)),
        }
    }
    let hits: Vec<String> = t
        .column_names()
        .filter(|c| !exclude.iter().any(|e| e == c) && holds_all(c))
        .map(str::to_string)
        .collect();
    match hits.len() {
        0 => Err(MqlError::UnknownLabels(labels.to_vec())),
        1 => Ok(hits.into_iter().next().unwrap_or_default()),
        _ => Err(MqlError::AmbiguousTarget(hits)),
    }
}

/// Training features in order. `*` expands to every column except the target,
/// the label columns and the class column; an explicit class column is dropped.
pub fn resolve_features(d: &Delta, from: &Table, class_column: Option<&str>) -> Result<Vec<String>> {
    let excluded = |c: &str| {
        d.target.as_deref() == Some(c) || class_column == Some(c) || d.labels.iter().any(|l| l == c)
    };
    match &d.features {
        None | Some(FeatureList::All) => Ok(from
            .column_names()
            .filter(|c| !excluded(c))
            .map(str::to_string)
            .collect()),
        Some(FeatureList::Columns(cols)) => {
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            for c in cols {
                if !seen.insert(c.as_str()) {
                    return Err(MqlError::DuplicateColumn(c.clone()));
                }
                if !from.has_column(c) {
                    return Err(MqlError::UnknownColumn(c.clone()));
                }
                if d.target.as_deref() == Some(c.as_str()) {
                    return Err(MqlError::TargetInFeatures(c.clone()));
                }
                if class_column != Some(c.as_str()) {
                    out.push(c.clone());
                }
            }
            Ok(out)
        }
    }
}

fn listed(d: &Delta) -> Option<&[String]> {
    match &d.features {
        Some(FeatureList::Columns(c)) => Some(c),
        _ => None,
    }
}

struct Sink(Vec<Diagnostic>);

impl Sink {
    fn err(&mut self, e: &MqlError, clause: &'static str) {
        self.0.push(Diagnostic::from_error(e, Some(clause)));
    }

    fn error(&mut self, code: Code, clause: &'static str, msg: impl Into<String>) {
        self.0.push(Diagnostic::error(code, Some(clause), msg));
    }

    fn table(&mut self, catalog: &dyn Catalog, name: &str, clause: &'static str) -> Option<Arc<Table>> {
        match catalog.table(name) {
            Ok(t) => Some(t),
            Err(e) => {
                self.err(&e, clause);
                None
            }
        }
    }
}

/// Checks a descriptor without running anything. An empty list means valid.
pub fn validate(d: &Delta, catalog: &dyn Catalog) -> Vec<Diagnostic> {
    let mut s = Sink(Vec::new());
    if let Some(raw) = d.accuracy_raw {
        match normalize_accuracy(raw) {
            Err(e) => s.err(&e, "WITH MODEL ACCURACY"),
            Ok(a) if a.rescaled => s.0.push(Diagnostic::warning(
                Code::AccuracyRescaled,
                Some("WITH MODEL ACCURACY"),
                format!("accuracy {raw} read as a percentage ({})", a.value),
            )),
            Ok(_) => {}
        }
    }
    if d.from_tables.len() > 1 {
        s.error(
            Code::MultipleTables,
            "FROM",
            format!("only one FROM table is supported, got {}", d.from_tables.len()),
        );
        return s.0;
    }
    match d.st_type {
        StType::Ins => inspect(d, catalog, &mut s),
        StType::Gen | StType::Con => task(d, catalog, &mut s),
    }
    s.0
}

fn inspect(d: &Delta, catalog: &dyn Catalog, s: &mut Sink) {
    let Some(name) = d.from_table() else {
        s.error(Code::NoInput, "FROM", "INSPECT needs a FROM table");
        return;
    };
    let Some(t) = s.table(catalog, name, "FROM") else { return };
    if let Some(p) = &d.filter {
        if let Err(e) = p.check(&t) {
            s.err(&e, "WHERE");
        }
    }
    let mut seen = HashSet::new();
    for a in &d.actions {
        if !seen.insert(a.column.as_str()) {
            s.err(&MqlError::DuplicateColumn(a.column.clone()), "INSPECT");
        }
        if !t.has_column(&a.column) {
            s.err(&MqlError::UnknownColumn(a.column.clone()), "INSPECT");
            continue;
        }
        if let WrangleAction::Numerize(e) = &a.action {
            if let Some(other) = e.columns().into_iter().find(|c| *c != a.column) {
                s.error(
                    Code::Expression,
                    "INSPECT",
                    format!("NUMERIZE AS for `{}` may only reference `{}`, found `{other}`", a.column, a.column),
                );
            }
        }
    }
}

fn task(d: &Delta, catalog: &dyn Catalog, s: &mut Sink) {
    let ml = d.ml_type.expect("GENERATE and CONSTRUCT have a task");
    match (d.supervision, ml) {
        (Some(Supervision::Supervised), MlType::Clus) => s.err(
            &MqlError::SupervisionMismatch("CLUSTER is unsupervised but the model is declared SUPERVISED".into()),
            "AS",
        ),
        (Some(Supervision::Unsupervised), MlType::Pred | MlType::Class) => s.err(
            &MqlError::SupervisionMismatch(format!(
                "{} is supervised but the model is declared UNSUPERVISED",
                ml.keyword()
            )),
            "AS",
        ),
        _ => {}
    }
    if let Some(name) = &d.construct_name {
        if let Err(e) = validate_name(name) {
            s.err(&e, "CONSTRUCT");
        }
    }
    if let Some(a) = &d.alg_name {
        match Algorithm::lookup(a) {
            None => {
                let known: Vec<&str> = Algorithm::candidates(ml).iter().map(|a| a.name()).collect();
                s.error(
                    Code::UnknownAlgorithm,
                    "ALGORITHM",
                    format!("unknown algorithm `{a}`; {} supports {}", ml.keyword(), known.join(", ")),
                );
            }
            Some(alg) if !alg.supports(ml) => s.error(
                Code::UnknownAlgorithm,
                "ALGORITHM",
                format!("algorithm `{alg}` does not support {}", ml.keyword()),
            ),
            Some(_) => {}
        }
    }
    if d.model == ModelMode::Stored {
        stored(d, catalog, s, ml);
    } else {
        trained(d, catalog, s, ml);
    }
}

fn stored(d: &Delta, catalog: &dyn Catalog, s: &mut Sink, ml: MlType) {
    let name = d.mod_name.as_deref().unwrap_or_default();
    let mf = match catalog.manifest(name) {
        Ok(m) => m,
        Err(e) => {
            s.err(&e, "USING MODEL");
            return;
        }
    };
    let mismatch = |msg: String| MqlError::SchemaMismatch(msg);
    if mf.ml_type != ml {
        s.err(
            &mismatch(format!("model `{name}` is a {} model, not {}", mf.ml_type.keyword(), ml.keyword())),
            "USING MODEL",
        );
        return;
    }
    if let (Some(t), Some(mt)) = (&d.target, &mf.target) {
        if t != mt {
            s.err(&mismatch(format!("model `{name}` predicts `{mt}`, not `{t}`")), "PREDICTION");
        }
    }
    if let Some(missing) = d.class_labels.iter().find(|l| !mf.class_labels.contains(l)) {
        s.err(&mismatch(format!("model `{name}` has no class `{missing}`")), "CLASSIFICATION");
    }
    if let Some(cols) = listed(d) {
        let want: HashSet<&str> = mf.features.iter().map(|f| f.name.as_str()).collect();
        let got: HashSet<&str> = cols.iter().map(String::as_str).collect();
        if want != got {
            s.err(&mismatch(format!("FEATURES differ from the features of model `{name}`")), "FEATURES");
        }
    }
    let (input, clause) = match (&d.over_table, d.from_table()) {
        (Some(o), _) => (o.as_str(), "OVER"),
        (None, Some(f)) => (f, "FROM"),
        (None, None) => {
            s.error(Code::NoInput, "OVER", "USING MODEL needs an OVER or FROM table to run on");
            return;
        }
    };
    let Some(t) = s.table(catalog, input, clause) else { return };
    for f in &mf.features {
        match t.column(&f.name) {
            Err(_) => s.err(&mismatch(format!("`{input}` has no column `{}` required by model `{name}`", f.name)), clause),
            Ok(c) if c.dtype() != f.dtype => s.err(
                &mismatch(format!("`{input}`.`{}` is {}, model `{name}` expects {}", f.name, c.dtype(), f.dtype)),
                clause,
            ),
            Ok(_) => {}
        }
    }
    for l in &d.labels {
        if !t.has_column(l) {
            s.err(&MqlError::UnknownColumn(l.clone()), "LABEL");
        }
    }
}

fn trained(d: &Delta, catalog: &dyn Catalog, s: &mut Sink, ml: MlType) {
    let Some(name) = d.from_table() else {
        s.error(Code::NoInput, "FROM", "FROM is required unless USING MODEL is given");
        return;
    };
    let Some(from) = s.table(catalog, name, "FROM") else { return };
    let rows = match &d.filter {
        Some(p) => match p.matching_rows(&from) {
            Ok(r) => r.len(),
            Err(e) => {
                s.err(&e, "WHERE");
                return;
            }
        },
        None => from.row_count(),
    };

    let mut class_column = None;
    match ml {
        MlType::Pred => {
            let target = d.target.as_deref().unwrap_or_default();
            match from.column(target) {
                Err(_) => {
                    s.err(
                        &MqlError::TargetNotInSchema {
                            target: target.into(),
                            table: name.into(),
                        },
                        "PREDICTION",
                    );
                    return;
                }
                Ok(c) if c.dtype() == DType::Categorical => s.err(
                    &MqlError::DatatypeFail {
                        column: target.into(),
                        reason: "is categorical but PREDICTION needs a numeric target".into(),
                    },
                    "PREDICTION",
                ),
                Ok(_) => {}
            }
        }
        MlType::Class => match infer_class_column(&from, &d.class_labels, listed(d), &d.labels) {
            Ok(c) => {
                if listed(d).is_some_and(|l| l.contains(&c)) {
                    s.0.push(Diagnostic::warning(
                        Code::ClassColumnExcluded,
                        Some("FEATURES"),
                        format!("class column `{c}` is the target and is not used as a feature"),
                    ));
                }
                class_column = Some(c);
            }
            Err(e) => {
                s.err(&e, "CLASSIFICATION");
                return;
            }
        },
        MlType::Clus => {
            let k = d.k_expr.as_ref().map(|k| k.eval_count(rows));
            match k {
                Some(Err(e)) => s.err(&e, "CLUSTER OF"),
                Some(Ok(0)) => s.error(Code::KOutOfRange, "CLUSTER OF", "CLUSTER OF needs k >= 1"),
                Some(Ok(k)) if k > rows => s.err(&MqlError::KExceedsRows { k, rows }, "CLUSTER OF"),
                _ => {}
            }
        }
    }

    let features = match resolve_features(d, &from, class_column.as_deref()) {
        Ok(f) => f,
        Err(e) => {
            s.err(&e, "FEATURES");
            return;
        }
    };
    if features.is_empty() {
        s.err(&MqlError::DegenerateDesign("no feature columns remain".into()), "FEATURES");
        return;
    }
    for f in &features {
        if from.column(f).is_ok_and(|c| c.dtype() == DType::Categorical) {
            s.err(
                &MqlError::DatatypeFail {
                    column: f.clone(),
                    reason: "is categorical and cannot feed a numeric model".into(),
                },
                "FEATURES",
            );
        }
    }

    if let (Some(n), Some(m)) = (&d.train_n, &d.test_m) {
        match (n.eval_count(rows), m.eval_count(rows)) {
            (Err(e), _) | (_, Err(e)) => s.err(&e, "TRAIN ON"),
            (Ok(0), _) => s.err(&MqlError::DegenerateDesign("TRAIN ON must be at least 1".into()), "TRAIN ON"),
            (Ok(n), _) if n > rows => s.err(
                &MqlError::TrainTooLarge {
                    requested: n,
                    available: rows,
                },
                "TRAIN ON",
            ),
            _ => {}
        }
    }

    let label_source = match &d.over_table {
        Some(over) => {
            let Some(t) = s.table(catalog, over, "OVER") else { return };
            for f in &features {
                match t.column(f) {
                    Err(_) => s.err(
                        &MqlError::SchemaMismatch(format!("`{over}` has no feature column `{f}`")),
                        "OVER",
                    ),
                    Ok(c) if c.dtype() == DType::Categorical => s.err(
                        &MqlError::DatatypeFail {
                            column: f.clone(),
                            reason: format!("is categorical in `{over}`"),
                        },
                        "OVER",
                    ),
                    Ok(_) => {}
                }
            }
            t
        }
        None => from,
    };
    for l in &d.labels {
        if !label_source.has_column(l) {
            s.err(&MqlError::UnknownColumn(l.clone()), "LABEL");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::gather;
    use crate::syntax::parse_statement;
    use crate::table::read_csv;
    use std::collections::HashMap;

    struct Fake(HashMap<String, Arc<Table>>);

    impl Catalog for Fake {
        fn table(&self, name: &str) -> Result<Arc<Table>> {
            self.0.get(name).cloned().ok_or_else(|| MqlError::UnknownTable(name.into()))
        }
        fn manifest(&self, name: &str) -> Result<Manifest> {
            Err(MqlError::UnknownModel(name.into()))
        }
    }

    fn catalog() -> Fake {
        let boston = read_csv(
            "CRIM,ZN,NOX,DIS,TAX,PTRATIO,CHAS,MEDV\n0.1,18,0.5,4,296,15,0,24\n0.2,0,0.4,5,242,17,1,21\n".as_bytes(),
            "bostonHomes",
        )
        .unwrap();
        let homes = crate::table::tests::homes_new();
        let pets = read_csv("w,h,kind,tag\n1,2,cat,a\n2,3,dog,b\n3,1,cat,c\n".as_bytes(), "pets").unwrap();
        Fake(HashMap::from([
            ("bostonHomes".to_string(), Arc::new(boston)),
            ("homesNew".to_string(), Arc::new(homes)),
            ("pets".to_string(), Arc::new(pets)),
        ]))
    }

    fn codes(text: &str) -> Vec<Code> {
        let d = gather(&parse_statement(text).unwrap());
        validate(&d, &catalog()).into_iter().filter(|d| d.is_error()).map(|d| d.code).collect()
    }

    #[test]
    fn fig1_is_clean() {
        let d = gather(
            &parse_statement(
                "GENERATE DISPLAY OF PREDICTION MEDV OVER homesNew LABEL HomeNo \
                 FEATURES CRIM, ZN, NOX, DIS, TAX, PTRATIO FROM bostonHomes",
            )
            .unwrap(),
        );
        assert_eq!(validate(&d, &catalog()), []);
    }

    #[test]
    fn target_in_features() {
        assert_eq!(codes("GENERATE PREDICTION MEDV FEATURES CRIM, MEDV FROM bostonHomes"), [Code::TargetInFeatures]);
    }

    #[test]
    fn categorical_feature_fails() {
        assert_eq!(codes("GENERATE PREDICTION w FEATURES h, tag FROM pets"), [Code::DatatypeFail]);
    }

    #[test]
    fn unknown_names() {
        assert_eq!(codes("GENERATE PREDICTION MEDV FEATURES CRIM FROM nowhere"), [Code::UnknownTable]);
        assert_eq!(codes("GENERATE PREDICTION MEDV FEATURES CRIMx FROM bostonHomes"), [Code::UnknownColumn]);
        assert_eq!(codes("GENERATE PREDICTION price FEATURES CRIM FROM bostonHomes"), [Code::TargetNotInSchema]);
        assert_eq!(
            codes("GENERATE PREDICTION MEDV USING ALGORITHM Magic FEATURES CRIM FROM bostonHomes"),
            [Code::UnknownAlgorithm]
        );
        assert_eq!(
            codes("GENERATE PREDICTION Kappa OVER homesNew USING MODEL LipidGnn"),
            [Code::UnknownModel]
        );
    }

    #[test]
    fn algorithm_task_mismatch() {
        assert_eq!(
            codes("GENERATE PREDICTION MEDV USING ALGORITHM KMeans FEATURES CRIM FROM bostonHomes"),
            [Code::UnknownAlgorithm]
        );
    }

    #[test]
    fn supervision_mismatch() {
        assert_eq!(
            codes("CONSTRUCT m AS SUPERVISED FOR CLUSTER OF 2 TRAIN ON 2 TEST ON 0 FEATURES CRIM FROM bostonHomes"),
            [Code::SupervisionMismatch]
        );
        assert_eq!(
            codes("CONSTRUCT m AS UNSUPERVISED FOR PREDICTION MEDV TRAIN ON 2 TEST ON 0 FEATURES CRIM FROM bostonHomes"),
            [Code::SupervisionMismatch]
        );
    }

    #[test]
    fn class_column_inference() {
        assert_eq!(codes("GENERATE CLASSIFICATION INTO cat, dog FEATURES w, h FROM pets"), []);
        assert_eq!(codes("GENERATE CLASSIFICATION INTO cat, cow FEATURES w, h FROM pets"), [Code::UnknownLabels]);
        // Both CHAS and ZN hold 0 and ... only CHAS holds 0 and 1.
        assert_eq!(codes("GENERATE CLASSIFICATION INTO 0, 1 FEATURES CRIM FROM bostonHomes"), []);
        // 1, 2 fit both w and h; listing one of them disambiguates.
        assert_eq!(codes("GENERATE CLASSIFICATION INTO 1, 2 FEATURES * FROM pets"), [Code::AmbiguousTarget]);
        let t = catalog().table("pets").unwrap();
        let l = ["1".to_string(), "2".to_string()];
        assert_eq!(infer_class_column(&t, &l, Some(&["h".into()]), &[]).unwrap(), "h");
    }

    #[test]
    fn star_excludes_target_labels_and_class() {
        let t = catalog().table("pets").unwrap();
        let d = gather(&parse_statement("GENERATE CLASSIFICATION INTO cat, dog LABEL tag FEATURES * FROM pets").unwrap());
        assert_eq!(resolve_features(&d, &t, Some("kind")).unwrap(), ["w", "h"]);
        assert_eq!(codes("GENERATE CLASSIFICATION INTO cat, dog LABEL tag FEATURES * FROM pets"), []);
    }

    #[test]
    fn over_must_carry_features() {
        assert_eq!(
            codes("GENERATE PREDICTION MEDV OVER homesNew FEATURES CRIM, CHAS FROM bostonHomes"),
            [Code::ModelSchemaMismatch]
        );
    }

    #[test]
    fn accuracy_range_and_rescale() {
        assert_eq!(codes("GENERATE PREDICTION MEDV WITH MODEL ACCURACY 150 FEATURES CRIM FROM bostonHomes"), [Code::AccuracyRange]);
        let d = gather(&parse_statement("GENERATE PREDICTION MEDV WITH MODEL ACCURACY 80 FEATURES CRIM FROM bostonHomes").unwrap());
        let diags = validate(&d, &catalog());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::AccuracyRescaled);
        assert!(!diags[0].is_error());
    }

    #[test]
    fn inspect_checks() {
        assert_eq!(codes("INSPECT NOX IMPUTE FROM homesNew"), []);
        assert_eq!(codes("INSPECT FOO IMPUTE FROM homesNew"), [Code::UnknownColumn]);
        assert_eq!(codes("INSPECT NOX NUMERIZE AS log(TAX) FROM homesNew"), [Code::Expression]);
    }

    #[test]
    fn k_and_train_bounds() {
        assert_eq!(codes("GENERATE CLUSTER OF 3 FEATURES CRIM FROM bostonHomes"), [Code::KOutOfRange]);
        assert_eq!(
            codes("CONSTRUCT m FOR PREDICTION MEDV TRAIN ON COUNT(*) + 1 TEST ON 0 FEATURES CRIM FROM bostonHomes"),
            [Code::TrainTooLarge]
        );
    }
}
