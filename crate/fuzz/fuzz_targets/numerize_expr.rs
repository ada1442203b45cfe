#![no_main]

use libfuzzer_sys::fuzz_target;
use mql::syntax::parse_statement;

// NUMERIZE expressions reached through a full INSPECT statement.
fuzz_target!(|expr: &str| {
    let _ = parse_statement(&format!("INSPECT c NUMERIZE AS {expr} FROM t"));
});
