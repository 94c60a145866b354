#![no_main]

use evirank::catalog::catalog;
use evirank::ingest::parse_priors;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let ids: Vec<_> = catalog().iter().map(|i| i.id).collect();
    if let Ok(priors) = parse_priors(text, &ids) {
        assert!(priors.values().all(|v| v.is_finite() && *v >= 0.0));
    }
});
