#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(config) = snis::io::parse_experiment_json(text) {
            let emitted = snis::io::emit_experiment_json(&config);
            let back =
                snis::io::parse_experiment_json(&emitted).expect("emitted config reparses");
            assert_eq!(config, back);
        }
        // The multi-experiment reader shares the schema plus an id-uniqueness
        // check; exercise it on the same bytes.
        let _ = snis::io::parse_experiments_json(text);
    }
});
