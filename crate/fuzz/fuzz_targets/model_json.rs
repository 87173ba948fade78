#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Model specs arrive from user files; parsing must never panic, and an
    // accepted model must survive an emit/parse round trip unchanged.
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(model) = snis::io::parse_model_json(text) {
            let emitted = snis::io::emit_model_json(&model);
            let back = snis::io::parse_model_json(&emitted).expect("emitted model reparses");
            assert_eq!(model, back);
        }
    }
});
