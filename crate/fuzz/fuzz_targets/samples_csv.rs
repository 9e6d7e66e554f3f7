#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(rows) = loggas::io::parse_samples_csv(data) {
        for (_, state) in rows {
            assert!(state.windows(2).all(|p| p[0] <= p[1]));
        }
    }
});
