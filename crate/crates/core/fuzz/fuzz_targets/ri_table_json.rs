#![no_main]

use evirank::ingest::parse_ri_table;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = parse_ri_table(text) {
        assert!(table.entries().keys().all(|n| *n >= 1));
    }
});
