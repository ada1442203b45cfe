#![no_main]

use libfuzzer_sys::fuzz_target;
use mql::table::{read_csv, write_csv};

// Tables that load must write back and reload to the same cells.
fuzz_target!(|data: &[u8]| {
    if let Ok(t) = read_csv(data, "fuzz") {
        let mut out = Vec::new();
        write_csv(&t, &mut out).expect("write");
        let back = read_csv(out.as_slice(), "fuzz").expect("reload");
        assert!(back.column_names().eq(t.column_names()));
        assert_eq!(back.row_count(), t.row_count());
    }
});
