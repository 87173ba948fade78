#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Weighted empiricals carry a normalization invariant (weights sum to 1);
    // the parser must enforce it on arbitrary input without panicking.
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(we) = snis::io::parse_weighted_csv(text) {
            let emitted = snis::io::emit_weighted_csv(&we);
            let back = snis::io::parse_weighted_csv(&emitted).expect("emitted CSV reparses");
            assert_eq!(we.weights(), back.weights());
            assert_eq!(we.points().as_slice(), back.points().as_slice());
        }
    }
});
