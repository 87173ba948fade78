#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(schedule) = snis::io::parse_schedule_csv(text) {
            let emitted = snis::io::emit_schedule_csv(&schedule);
            let back = snis::io::parse_schedule_csv(&emitted).expect("emitted CSV reparses");
            assert_eq!(schedule.kind, back.kind);
            assert_eq!(schedule.rows, back.rows);
        }
    }
});
