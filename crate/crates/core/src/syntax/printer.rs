//! Canonical MQL text. One clause per line, in grammar order.

use super::ast::*;
use super::lexer::tokenize;
use super::token::{Keyword, TokenKind};
use crate::table::Predicate;

pub fn pretty_print(stmt: &Statement) -> String {
    let mut lines = Vec::new();
    match stmt {
        Statement::Generate(g) => generate(g, &mut lines),
        Statement::Construct(c) => construct(c, &mut lines),
        Statement::Inspect(i) => inspect(i, &mut lines),
    }
    lines.join("\n")
}

/// Statements separated by `;` and a blank line.
pub fn pretty_print_program(stmts: &[Statement]) -> String {
    let mut out = String::new();
    for s in stmts {
        out.push_str(&pretty_print(s));
        out.push_str(";\n\n");
    }
    out.truncate(out.trim_end().len());
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

fn is_plain_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && Keyword::lookup(s).is_none()
}

pub(crate) fn ident(s: &str) -> String {
    if is_plain_ident(s) {
        s.to_string()
    } else {
        format!("\"{}\"", s.replace('"', "\"\""))
    }
}

fn table(s: &str) -> String {
    if s.split('.').all(is_plain_ident) {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', "''"))
    }
}

fn label(s: &str) -> String {
    if is_plain_ident(s) {
        return s.to_string();
    }
    let single_number = matches!(
        tokenize(s).as_deref(),
        Ok([t]) if t.kind == TokenKind::Number(s.to_string())
    );
    if single_number {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', "''"))
    }
}

fn join(items: &[String], f: fn(&str) -> String) -> String {
    items.iter().map(|s| f(s)).collect::<Vec<_>>().join(", ")
}

fn task(t: &TaskHead) -> String {
    match t {
        TaskHead::Prediction { target } => format!("PREDICTION {}", ident(target)),
        TaskHead::Classification { labels } => {
            format!("CLASSIFICATION INTO {}", join(labels, label))
        }
        TaskHead::Cluster { k } => format!("CLUSTER OF {}", int_expr(k)),
    }
}

fn features(f: &FeatureList) -> String {
    match f {
        FeatureList::All => "FEATURES *".into(),
        FeatureList::Columns(c) => format!("FEATURES {}", join(c, ident)),
    }
}

fn from_where(from: &[String], filter: &Option<Predicate>, lines: &mut Vec<String>) {
    if !from.is_empty() {
        lines.push(format!("FROM {}", join(from, table)));
    }
    if let Some(p) = filter {
        let terms: Vec<String> = p
            .terms
            .iter()
            .map(|t| format!("{} {} {}", ident(&t.column), t.op.symbol(), t.value))
            .collect();
        lines.push(format!("WHERE {}", terms.join(" AND ")));
    }
}

fn generate(g: &GenerateClauses, lines: &mut Vec<String>) {
    lines.push(if g.display {
        "GENERATE DISPLAY OF".into()
    } else {
        "GENERATE".into()
    });
    lines.push(task(&g.task));
    if let Some(over) = &g.over {
        lines.push(format!("OVER {}", table(over)));
    }
    match &g.model_ref {
        ModelRef::None => {}
        ModelRef::Stored(m) => lines.push(format!("USING MODEL {}", ident(m))),
        ModelRef::Algorithm(a) => lines.push(format!("USING ALGORITHM {}", ident(a))),
    }
    if let Some(p) = g.accuracy {
        lines.push(format!("WITH MODEL ACCURACY {p}"));
    }
    if !g.labels.is_empty() {
        lines.push(format!("LABEL {}", join(&g.labels, ident)));
    }
    if let Some(f) = &g.features {
        lines.push(features(f));
    }
    from_where(&g.from, &g.filter, lines);
}

fn construct(c: &ConstructClauses, lines: &mut Vec<String>) {
    let mut head = format!("CONSTRUCT {}", ident(&c.model_name));
    match c.supervision {
        Some(Supervision::Supervised) => head.push_str(" AS SUPERVISED"),
        Some(Supervision::Unsupervised) => head.push_str(" AS UNSUPERVISED"),
        None => {}
    }
    lines.push(head);
    lines.push(format!("FOR {}", task(&c.task)));
    if let Some(a) = &c.algorithm {
        lines.push(format!("USING {}", ident(a)));
    }
    if let Some(p) = c.accuracy {
        lines.push(format!("WITH MODEL ACCURACY {p}"));
    }
    lines.push(format!(
        "TRAIN ON {} TEST ON {}",
        int_expr(&c.train_n),
        int_expr(&c.test_m)
    ));
    lines.push(features(&c.features));
    from_where(&c.from, &c.filter, lines);
}

fn inspect(i: &InspectClauses, lines: &mut Vec<String>) {
    let actions: Vec<String> = i
        .actions
        .iter()
        .map(|a| {
            let action = match &a.action {
                WrangleAction::Categorize(labels) => {
                    format!("CATEGORIZE INTO {}", join(labels, label))
                }
                WrangleAction::Impute => "IMPUTE".into(),
                WrangleAction::Numerize(e) => format!("NUMERIZE AS {}", expr(e)),
                WrangleAction::Deduplicate => "DEDUPLICATE".into(),
            };
            format!("{} {action}", ident(&a.column))
        })
        .collect();
    if actions.is_empty() {
        lines.push("INSPECT".into());
    } else {
        lines.push(format!("INSPECT {}", actions.join(",\n  ")));
    }
    from_where(&i.from, &i.filter, lines);
}

pub fn int_expr(e: &IntExpr) -> String {
    match e {
        IntExpr::Literal(v) => v.to_string(),
        IntExpr::CountAll => "COUNT(*)".into(),
        IntExpr::Binary(l, op, r) => {
            format!("{} {} {}", int_operand(l), op.symbol(), int_operand(r))
        }
    }
}

fn int_operand(e: &IntExpr) -> String {
    match e {
        IntExpr::Binary(..) => format!("({})", int_expr(e)),
        _ => int_expr(e),
    }
}

pub fn expr(e: &Expr) -> String {
    match e {
        Expr::Number(v) => format!("{v}"),
        Expr::Column(c) => ident(c),
        Expr::Neg(inner) => format!("-{}", operand(inner)),
        Expr::Binary(l, op, r) => format!("{} {} {}", operand(l), op.symbol(), operand(r)),
        Expr::Call(f, arg) => format!("{}({})", f.name(), expr(arg)),
    }
}

fn operand(e: &Expr) -> String {
    match e {
        Expr::Binary(..) | Expr::Neg(_) => format!("({})", expr(e)),
        _ => expr(e),
    }
}
