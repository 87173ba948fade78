#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(we) = snis::io::parse_weighted_json(text) {
            let emitted = snis::io::emit_weighted_json(&we);
            let back = snis::io::parse_weighted_json(&emitted).expect("emitted JSON reparses");
            assert_eq!(we.weights(), back.weights());
            assert_eq!(we.points().as_slice(), back.points().as_slice());
            assert_eq!(we.log_normalizer(), back.log_normalizer());
        }
    }
});
