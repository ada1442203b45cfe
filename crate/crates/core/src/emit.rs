//! Backend script emission. Scripts are assembled from the text templates in
//! `templates/` by placeholder substitution; the templates and the backend name
//! table carry all framework knowledge.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::analyzer::{infer_class_column, resolve_features, Delta, ModelMode, StType};
use crate::error::{MqlError, Result};
use crate::learn::{default_split_sizes, Algorithm, MlType};
use crate::planner::{MissingPolicy, Session};
use crate::syntax::{ArithOp, Expr, FeatureList, Func, WrangleAction};
use crate::table::{DType, Literal, Predicate, Table};

macro_rules! templates {
    ($($name:literal),* $(,)?) => {
        const TEMPLATES: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../templates/", $name, ".tmpl"))),)*
        ];
    };
}

templates!(
    "header", "load", "filter", "extract", "extract_class", "extract_cluster", "split_fraction",
    "split_counts", "split_train_only", "split_none", "model", "fit", "best", "predict", "metric_mse",
    "metric_accuracy", "metric_silhouette", "accuracy_check", "coefficients", "over_impute", "over_zero",
    "heldout_predictions", "plot_bar", "plot_class_bar", "plot_scatter", "plot_clusters", "cluster_over",
    "cluster_all", "save_model", "inspect_load", "inspect_impute_numeric", "inspect_impute_categorical",
    "inspect_numerize", "inspect_categorize", "inspect_deduplicate", "inspect_save",
);

const BACKEND_NAMES: &str = include_str!("../templates/backend_names.tsv");
const METRIC_IMPORTS: &str = include_str!("../templates/metric_imports.tsv");

/// Template text by name.
pub fn template(name: &str) -> &'static str {
    TEMPLATES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .unwrap_or_else(|| panic!("no template `{name}`"))
}

type Vars = BTreeMap<&'static str, String>;

/// Replaces every `{{key}}`. An unknown key is a bug in the caller.
pub fn fill(template: &str, vars: &Vars) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(start) = rest.find("{{") {
        out.push_str(&rest[..start]);
        let end = rest[start..].find("}}").expect("unterminated placeholder") + start;
        let key = &rest[start + 2..end];
        out.push_str(vars.get(key).unwrap_or_else(|| panic!("no value for placeholder `{key}`")));
        rest = &rest[end + 2..];
    }
    out.push_str(rest);
    out
}

/// One row of the backend name table.
#[derive(Debug, Clone, Copy)]
struct Backend {
    import: &'static str,
    constructor: &'static str,
    score: &'static str,
}

fn backend(ml: MlType, alg: Algorithm) -> Result<Backend> {
    BACKEND_NAMES
        .lines()
        .skip(1)
        .map(|l| l.split('\t').collect::<Vec<_>>())
        .find(|f| f.len() == 5 && f[0] == ml.to_string() && f[1] == alg.name())
        .map(|f| Backend {
            import: f[2],
            constructor: f[3],
            score: f[4],
        })
        .ok_or_else(|| MqlError::UnsupportedForEmission(format!("no backend for {alg} on {}", ml.keyword())))
}

fn metric_import(ml: MlType) -> &'static str {
    METRIC_IMPORTS
        .lines()
        .find_map(|l| l.strip_prefix(ml.to_string().as_str()).and_then(|r| r.strip_prefix('\t')))
        .unwrap_or_default()
}

/// Python string literal in single quotes.
pub fn py_str(s: &str) -> String {
    let mut out = String::from("'");
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\'' => out.push_str("\\'"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\x{:02x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

fn py_list(items: &[String]) -> String {
    let parts: Vec<String> = items.iter().map(|s| py_str(s)).collect();
    format!("[{}]", parts.join(", "))
}

/// Class labels as Python values; numeric when the class column is numeric.
fn py_labels(labels: &[String], numeric: bool) -> String {
    let parts: Vec<String> = labels
        .iter()
        .map(|l| match l.trim().parse::<f64>() {
            Ok(v) if numeric && v.is_finite() => format!("{v:?}"),
            _ => py_str(l),
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

fn py_float(v: f64) -> String {
    format!("{v:?}")
}

/// Boolean mask over `df` for a WHERE predicate.
fn py_mask(p: &Predicate) -> String {
    let terms: Vec<String> = p
        .terms
        .iter()
        .map(|t| {
            let value = match &t.value {
                Literal::Number(v) => py_float(*v),
                Literal::Text(s) => py_str(s),
            };
            let op = match t.op.symbol() {
                "=" => "==",
                "<>" => "!=",
                s => s,
            };
            format!("(df[{}] {op} {value})", py_str(&t.column))
        })
        .collect();
    terms.join(" & ")
}

/// NUMERIZE expression over the column bound to `x`.
fn py_expr(e: &Expr) -> String {
    match e {
        Expr::Number(v) => py_float(*v),
        Expr::Column(_) => "x".into(),
        Expr::Neg(a) => format!("(-{})", py_expr(a)),
        Expr::Binary(a, op, b) => {
            let op = match op {
                ArithOp::Add => "+",
                ArithOp::Sub => "-",
                ArithOp::Mul => "*",
                ArithOp::Div => "/",
            };
            format!("({} {op} {})", py_expr(a), py_expr(b))
        }
        Expr::Call(f, a) => {
            let name = match f {
                Func::Log => "np.log",
                Func::Log10 => "np.log10",
                Func::Exp => "np.exp",
                Func::Abs => "np.abs",
                Func::Sqrt => "np.sqrt",
            };
            format!("{name}({})", py_expr(a))
        }
    }
}

impl Session {
    /// Where an emitted script reads `name`: the inspected copy for bound tables.
    fn script_path(&self, name: &str) -> Result<PathBuf> {
        if self.binding(name).is_some() {
            return Ok(self.out_path(&format!("{}.inspected.csv", crate::planner::table_stem(name))));
        }
        self.resolve_path(name)
            .ok_or_else(|| MqlError::UnknownTable(name.to_string()))
    }
}

fn base_vars(d: &Delta, s: &Session, i: usize, algorithm: &str, data: &str, over: &str) -> Vars {
    let kind = match d.st_type {
        StType::Gen => "generate",
        StType::Con => "construct",
        StType::Ins => "inspect",
    };
    Vars::from([
        ("statement", i.to_string()),
        ("kind", kind.to_string()),
        ("task", d.ml_type.map_or("wrangle", |m| m.keyword()).to_string()),
        ("algorithm", algorithm.to_string()),
        ("data_path", data.to_string()),
        ("data_literal", py_str(data)),
        ("over_path", over.to_string()),
        ("over_literal", py_str(over)),
        ("seed", s.seed.to_string()),
        ("missing", s.missing.to_string()),
    ])
}

/// Script for `d` as statement `i`.
pub fn emit_script(d: &Delta, s: &Session, i: usize) -> Result<String> {
    match d.st_type {
        StType::Ins => emit_inspect(d, s, i),
        _ => emit_task(d, s, i),
    }
}

fn emit_inspect(d: &Delta, s: &Session, i: usize) -> Result<String> {
    let name = d.from_table().unwrap_or_default();
    let data = s.script_path(name)?.display().to_string();
    let mut vars = base_vars(d, s, i, "", &data, "");
    let mut t: Table = (*s.resolve_table(name)?).clone();
    let out = s.out_path(&format!("{}.inspected.csv", crate::planner::table_stem(name)));
    vars.insert("output_literal", py_str(&out.display().to_string()));
    let mut script = fill(template("header"), &vars);
    script.push_str(&fill(template("inspect_load"), &vars));
    if let Some(p) = &d.filter {
        vars.insert("mask", py_mask(p));
        script.push_str(&fill(template("filter"), &vars));
    }
    for a in &d.actions {
        vars.insert("column", a.column.clone());
        vars.insert("column_literal", py_str(&a.column));
        let stanza = match &a.action {
            WrangleAction::Impute => match t.column(&a.column)?.dtype() {
                DType::Numeric => "inspect_impute_numeric",
                DType::Categorical => "inspect_impute_categorical",
            },
            WrangleAction::Numerize(e) => {
                vars.insert("expression", crate::syntax::print_expr(e));
                vars.insert("numpy_expression", py_expr(e));
                "inspect_numerize"
            }
            WrangleAction::Categorize(labels) => {
                vars.insert("label_names", labels.join(", "));
                vars.insert("labels", py_list(labels));
                "inspect_categorize"
            }
            WrangleAction::Deduplicate => "inspect_deduplicate",
        };
        script.push_str(&fill(template(stanza), &vars));
        t = crate::wrangler::inspect_execute(std::slice::from_ref(a), &t)?.0;
    }
    script.push_str(&fill(template("inspect_save"), &vars));
    Ok(script)
}

fn emit_task(d: &Delta, s: &Session, i: usize) -> Result<String> {
    let ml = d.ml_type.expect("task statement");
    let algorithms = match d.model {
        ModelMode::Stored => {
            return Err(MqlError::UnsupportedForEmission(
                "USING MODEL refers to the native model store".into(),
            ))
        }
        ModelMode::Custom => {
            let name = d.alg_name.as_deref().unwrap_or_default();
            vec![Algorithm::lookup(name).ok_or_else(|| MqlError::UnknownAlgorithm(name.to_string()))?]
        }
        ModelMode::Default => vec![Algorithm::default_for(ml)],
        ModelMode::Best => Algorithm::candidates(ml),
    };
    let from_name = d.from_table().unwrap_or_default();
    let from = s.resolve_table(from_name)?;
    let data = s.script_path(from_name)?.display().to_string();
    let over = match &d.over_table {
        Some(o) => s.script_path(o)?.display().to_string(),
        None => String::new(),
    };
    let alg_label = if d.model == ModelMode::Best {
        "best".to_string()
    } else {
        algorithms[0].to_string()
    };
    let mut vars = base_vars(d, s, i, &alg_label, &data, &over);

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
        MlType::Pred => d.target.clone().unwrap_or_default(),
        MlType::Class => class_column.clone().unwrap_or_default(),
        MlType::Clus => String::new(),
    };
    vars.insert("features", py_list(&features));
    vars.insert("feature_names", features.join(", "));
    vars.insert("target", target.clone());
    vars.insert("target_literal", py_str(&target));
    if ml == MlType::Class {
        let numeric = from.column(&target).is_ok_and(|c| c.dtype() == DType::Numeric);
        vars.insert("class_labels", py_labels(&d.class_labels, numeric));
    }

    let filtered = match &d.filter {
        Some(p) => from.apply_where(p)?,
        None => (*from).clone(),
    };
    let count_all = filtered.row_count();
    let mut needed = features.clone();
    if !target.is_empty() {
        needed.push(target.clone());
    }
    let usable = filtered.complete_rows(&needed)?.len();
    let k = d.k_expr.as_ref().map(|k| k.eval_count(count_all)).transpose()?;
    vars.insert("k", k.unwrap_or(0).to_string());

    let backends = algorithms
        .iter()
        .map(|&a| backend(ml, a).map(|b| (a, b)))
        .collect::<Result<Vec<_>>>()?;
    let imports: Vec<&str> = backends.iter().map(|(_, b)| b.import).collect();
    vars.insert("model_import", imports.join("\n"));
    vars.insert("metric_import", metric_import(ml).to_string());

    let mut script = fill(template("header"), &vars);
    script.push_str(&fill(template("load"), &vars));
    if let Some(p) = &d.filter {
        vars.insert("mask", py_mask(p));
        script.push_str(&fill(template("filter"), &vars));
    }
    script.push_str(&fill(
        template(match ml {
            MlType::Pred => "extract",
            MlType::Class => "extract_class",
            MlType::Clus => "extract_cluster",
        }),
        &vars,
    ));

    let split = match (&d.train_n, &d.test_m) {
        (Some(n), Some(m)) => {
            let n = n.eval_count(count_all)?;
            if n == 0 || n > usable {
                return Err(MqlError::TrainTooLarge {
                    requested: n,
                    available: usable,
                });
            }
            let m = m.eval_count(count_all)?.min(usable - n);
            vars.insert("train_n", n.to_string());
            vars.insert("test_m", m.to_string());
            if m == 0 {
                "split_train_only"
            } else {
                "split_counts"
            }
        }
        _ if ml == MlType::Clus => "split_none",
        _ => {
            let (_, m) = default_split_sizes(usable);
            if m == 0 {
                return Err(MqlError::UnsupportedForEmission(format!(
                    "{usable} usable rows leave no test split"
                )));
            }
            vars.insert("test_size", "0.2".into());
            "split_fraction"
        }
    };
    script.push_str(&fill(template(split), &vars));

    let ctor = |b: &Backend| fill(b.constructor, &vars);
    if d.model == ModelMode::Best {
        let entries: Vec<String> = backends
            .iter()
            .map(|(a, b)| format!("    {}: {},", py_str(a.name()), ctor(b)))
            .collect();
        let mut v = vars.clone();
        v.insert("candidates", entries.join("\n"));
        v.insert("score_expr", backends[0].1.score.to_string());
        v.insert("threshold", py_float(d.accuracy.unwrap_or(0.0)));
        script.push_str(&fill(template("best"), &v));
    } else {
        vars.insert("model_ctor", ctor(&backends[0].1));
        script.push_str(&fill(template("model"), &vars));
        script.push_str(&fill(template("fit"), &vars));
    }
    script.push_str(&fill(template("predict"), &vars));
    script.push_str(&fill(
        template(match ml {
            MlType::Pred => "metric_mse",
            MlType::Class => "metric_accuracy",
            MlType::Clus => "metric_silhouette",
        }),
        &vars,
    ));
    if let (Some(p), false) = (d.accuracy, d.model == ModelMode::Best) {
        vars.insert("score_expr", backends[0].1.score.to_string());
        vars.insert("threshold", py_float(p));
        script.push_str(&fill(template("accuracy_check"), &vars));
    }
    if d.model != ModelMode::Best && matches!(algorithms[0], Algorithm::LinearRegression | Algorithm::Ridge) {
        script.push_str(&fill(template("coefficients"), &vars));
    }

    if d.st_type == StType::Con {
        let name = d.construct_name.clone().unwrap_or_default();
        let path = s.out_path(&format!("stmt{i:02}_{name}.joblib"));
        vars.insert("model_name", name);
        vars.insert("model_literal", py_str(&path.display().to_string()));
        script.push_str(&fill(template("save_model"), &vars));
        return Ok(script);
    }

    let has_over = d.over_table.is_some();
    let scoring = match (ml, has_over, s.missing) {
        (MlType::Clus, true, policy) => {
            vars.insert(
                "fill_call",
                match policy {
                    MissingPolicy::Zero => "fillna(0)".into(),
                    MissingPolicy::Impute => "fillna(X_train.median())".into(),
                },
            );
            "cluster_over"
        }
        (MlType::Clus, false, _) => "cluster_all",
        (_, true, MissingPolicy::Impute) => "over_impute",
        (_, true, MissingPolicy::Zero) => "over_zero",
        (_, false, _) => "heldout_predictions",
    };
    script.push_str(&fill(template(scoring), &vars));

    if d.display {
        let plot = match (ml, has_over) {
            (MlType::Pred, true) => {
                vars.insert(
                    "bar_labels",
                    match d.labels.first() {
                        Some(l) => format!("test_samples[{}].tolist()", py_str(l)),
                        None => "list(range(1, len(predictions) + 1))".into(),
                    },
                );
                vars.insert("x_label", py_str(d.labels.first().map_or("row", String::as_str)));
                vars.insert("y_label", py_str(&target));
                ("plot_bar", "bar")
            }
            (MlType::Pred, false) => ("plot_scatter", "scatter"),
            (MlType::Class, _) => ("plot_class_bar", "bar"),
            (MlType::Clus, _) => {
                if features.len() < 2 {
                    return Err(MqlError::TooFewFeatures);
                }
                vars.insert("points_frame", if has_over { "X_over" } else { "X" }.into());
                ("plot_clusters", "clusters")
            }
        };
        let path = s.out_path(&format!("stmt{i:02}_{}.png", plot.1));
        vars.insert("plot_literal", py_str(&path.display().to_string()));
        script.push_str(&fill(template(plot.0), &vars));
    }
    Ok(script)
}
