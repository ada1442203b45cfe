use std::io::Write;
use std::path::PathBuf;

use mql::planner::{Output, Report, Session};
use mql::result::{fixed_width, OutputFormat};
use mql::table::{Column, Table};

/// Writes outputs to `out` and diagnostics to standard error. True when no error was reported.
pub fn report(out: &mut impl Write, r: &Report, format: OutputFormat) -> bool {
    for o in &r.outputs {
        let _ = match o {
            Output::Table { statement, name, table, log } => writeln!(
                out,
                "[{statement}] table {name}: {} rows, {} columns\n{}",
                table.row_count(),
                table.columns().len(),
                log.render().trim_end()
            ),
            Output::Model { statement, manifest } => writeln!(
                out,
                "[{statement}] model {} saved: {} {} on {} rows, score {:.4}",
                manifest.name,
                manifest.algorithm,
                manifest.ml_type.keyword(),
                manifest.train_rows,
                manifest.reference_metrics().normalized_score
            ),
            Output::Result(rs) => match rs.render(format) {
                Ok(text) => write!(out, "{text}"),
                Err(e) => writeln!(out, "[{}] cannot render result: {e}", rs.statement),
            },
            Output::Sweep { statement, scores } => {
                let list: Vec<String> = scores.iter().map(|(a, v)| format!("{a} {v:.4}")).collect();
                writeln!(out, "[{statement}] best-model sweep: {}", list.join(", "))
            }
            Output::Script { statement, path } => writeln!(out, "[{statement}] script {}", path.display()),
        };
    }
    for d in &r.diagnostics {
        eprintln!("{d}");
    }
    !r.has_errors()
}

pub fn artifacts(out: &mut impl Write, paths: &[PathBuf]) {
    for p in paths {
        let _ = writeln!(out, "wrote: {}", p.display());
    }
}

/// Fixed-width listing of the store; nothing is printed for an empty store.
pub fn models(out: &mut impl Write, s: &Session) -> bool {
    let list = match s.store.list() {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return false;
        }
    };
    if list.is_empty() {
        return true;
    }
    let col = |name: &str, f: &dyn Fn(&mql::store::Manifest) -> String| {
        Column::categorical(name, list.iter().map(|m| Some(f(m))).collect())
    };
    let t = Table::new(
        "models",
        vec![
            col("name", &|m| m.name.clone()),
            col("task", &|m| m.ml_type.to_string()),
            col("algorithm", &|m| m.algorithm.to_string()),
            col("features", &|m| m.features.len().to_string()),
            col("score", &|m| format!("{:.4}", m.reference_metrics().normalized_score)),
            col("created_at", &|m| m.created_at.clone()),
        ],
    );
    match t {
        Ok(t) => {
            let _ = write!(out, "{}", fixed_width(&t));
            true
        }
        Err(e) => {
            eprintln!("error: {e}");
            false
        }
    }
}
