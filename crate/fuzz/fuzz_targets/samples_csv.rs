#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Sample ingestion must reject garbage without panicking; accepted data
    // must round-trip bitwise through the emitter.
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(points) = snis::io::parse_samples_csv(text) {
            let emitted = snis::io::emit_samples_csv(&points);
            let back = snis::io::parse_samples_csv(&emitted).expect("emitted CSV reparses");
            assert_eq!(points.dim(), back.dim());
            assert_eq!(points.as_slice(), back.as_slice());
        }
    }
});
