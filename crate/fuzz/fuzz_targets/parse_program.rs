#![no_main]

use libfuzzer_sys::fuzz_target;
use mql::syntax::{parse_program, pretty_print_program};

// Anything that parses must survive a print/parse round trip unchanged.
fuzz_target!(|text: &str| {
    if let Ok(stmts) = parse_program(text) {
        let printed = pretty_print_program(&stmts);
        let again = parse_program(&printed).expect("printed program parses");
        assert_eq!(again, stmts);
    }
});
