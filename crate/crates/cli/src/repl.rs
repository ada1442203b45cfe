use std::io::{BufRead, Write};

use mql::planner::Session;
use mql::result::OutputFormat;
use mql::syntax::{tokenize, TokenKind};

use crate::print;

/// True once `buf` ends in a `;` token. Text that does not lex yet (an open
/// string) is incomplete.
fn complete(buf: &str) -> bool {
    tokenize(buf).is_ok_and(|t| t.last().is_some_and(|t| t.kind == TokenKind::Semicolon))
}

fn meta(line: &str, s: &mut Session, out: &mut impl Write, format: &mut OutputFormat) -> Option<bool> {
    let mut words = line.split_whitespace();
    match (words.next()?, words.next(), words.next()) {
        ("\\q", ..) => return Some(false),
        ("\\models", ..) => {
            print::models(out, s);
        }
        ("\\set", Some(key), Some(value)) => {
            if let Err(e) = set(s, format, key, value) {
                eprintln!("error: {e}");
            }
        }
        _ => eprintln!("meta-commands: \\q, \\models, \\set <seed|missing|backend|format|data-dir|out-dir> <value>"),
    }
    Some(true)
}

fn set(s: &mut Session, format: &mut OutputFormat, key: &str, value: &str) -> Result<(), String> {
    match key {
        "seed" => s.seed = value.parse().map_err(|_| format!("invalid seed `{value}`"))?,
        "missing" => s.missing = value.parse()?,
        "backend" => s.backend = value.parse()?,
        "format" => {
            *format = match value {
                "table" => OutputFormat::Table,
                "csv" => OutputFormat::Csv,
                "json" => OutputFormat::Json,
                _ => return Err(format!("unknown format `{value}`")),
            }
        }
        "data-dir" => s.data_dir = value.into(),
        "out-dir" => s.out_dir = value.into(),
        _ => return Err(format!("unknown setting `{key}`")),
    }
    Ok(())
}

/// Runs statements as they complete. A blank line or end of input also
/// submits a pending statement that lacks `;`. True when no statement failed.
pub fn run(s: &mut Session, input: impl BufRead, out: &mut impl Write, mut format: OutputFormat, prompt: bool) -> bool {
    let mut ok = true;
    let mut buf = String::new();
    let mut submit = |buf: &mut String, s: &mut Session, out: &mut _, format| {
        if !buf.trim().is_empty() {
            let r = s.run_text(buf);
            ok &= print::report(out, &r, format);
            print::artifacts(out, &r.artifacts);
        }
        buf.clear();
    };
    let mut lines = input.lines();
    loop {
        if prompt {
            let _ = write!(out, "{}", if buf.is_empty() { "mql> " } else { " ..> " });
            let _ = out.flush();
        }
        let Some(Ok(line)) = lines.next() else { break };
        if buf.trim().is_empty() && line.trim_start().starts_with('\\') {
            if meta(line.trim(), s, out, &mut format) == Some(false) {
                return ok;
            }
            continue;
        }
        if line.trim().is_empty() {
            submit(&mut buf, s, out, format);
            continue;
        }
        buf.push_str(&line);
        buf.push('\n');
        if complete(&buf) {
            submit(&mut buf, s, out, format);
        }
    }
    submit(&mut buf, s, out, format);
    ok
}
