#![no_main]

use evirank::ahp::{aggregate_geometric, consistency, DenominatorMode, RiTable};
use evirank::ingest::parse_matrices;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(set) = parse_matrices(text) else { return };
    for (_, m) in &set.experts {
        assert_eq!(m.order(), set.indicators.len());
    }
    if let Ok(g) = aggregate_geometric(&set.matrices()) {
        let _ = consistency(&g, &RiTable::default(), DenominatorMode::Paper);
    }
});
