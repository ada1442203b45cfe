//! Replays the fuzz corpus seeds through the same properties the fuzz targets check.

use std::path::{Path, PathBuf};

use mql::syntax::{parse_program, parse_statement, pretty_print_program, tokenize};
use mql::table::{read_csv, write_csv};

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn program_seeds_parse_and_round_trip() {
    for (path, bytes) in seeds("parse_program") {
        let text = String::from_utf8(bytes).unwrap();
        let stmts = parse_program(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(parse_program(&pretty_print_program(&stmts)).unwrap(), stmts, "{}", path.display());
    }
}

#[test]
fn token_seeds_lex() {
    for (path, bytes) in seeds("tokenize") {
        let text = String::from_utf8(bytes).unwrap();
        assert!(tokenize(&text).is_ok(), "{}", path.display());
    }
}

#[test]
fn csv_seeds_reload_after_write() {
    for (path, bytes) in seeds("read_csv") {
        let t = read_csv(bytes.as_slice(), "seed").unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let mut out = Vec::new();
        write_csv(&t, &mut out).unwrap();
        let back = read_csv(out.as_slice(), "seed").unwrap();
        assert!(back.column_names().eq(t.column_names()));
        assert_eq!(back.row_count(), t.row_count(), "{}", path.display());
    }
}

#[test]
fn expression_seeds_parse() {
    for (path, bytes) in seeds("numerize_expr") {
        let expr = String::from_utf8(bytes).unwrap();
        let text = format!("INSPECT c NUMERIZE AS {expr} FROM t");
        assert!(parse_statement(&text).is_ok(), "{}", path.display());
    }
}
