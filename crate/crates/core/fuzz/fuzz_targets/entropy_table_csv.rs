#![no_main]

use evirank::entropy::EntropyTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = EntropyTable::from_csv(text) {
        let again = EntropyTable::from_csv(&table.to_csv()).expect("own export reparses");
        assert_eq!(again.rows.len(), table.rows.len());
    }
});
