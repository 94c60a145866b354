#![no_main]

use evirank::catalog::catalog;
use evirank::ingest::{mean_scores, parse_scores};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let ids: Vec<_> = catalog().iter().map(|i| i.id).collect();
    if let Ok(rows) = parse_scores(text, &ids) {
        for row in &rows {
            assert!((0.0..=10.0).contains(&row.score.value()));
        }
        if let Ok(means) = mean_scores(&rows, &ids) {
            assert_eq!(means.len(), ids.len());
        }
    }
});
