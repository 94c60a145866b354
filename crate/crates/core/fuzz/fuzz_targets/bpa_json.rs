#![no_main]

use evirank::evidence::{average_bpas, murphy_combine, pignistic};
use evirank::ingest::parse_bpa_fixtures;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(named) = parse_bpa_fixtures(text) else { return };
    let bpas: Vec<_> = named.into_iter().map(|n| n.bpa).collect();
    for b in &bpas {
        assert!((b.total() - 1.0).abs() <= 1e-9);
        assert_eq!(b.revalidate().as_ref(), Ok(b));
    }
    let avg = average_bpas(&bpas).expect("non-empty input");
    let p: f64 = pignistic(&avg).iter().sum();
    assert!((p - 1.0).abs() <= 1e-9);
    let _ = murphy_combine(&bpas);
});
