#![no_main]
use libfuzzer_sys::fuzz_target;
use loggas::io::{parse_config_csv, write_config_csv};

fuzz_target!(|data: &str| {
    if let Ok(config) = parse_config_csv(data) {
        let again = parse_config_csv(&write_config_csv(&config)).expect("written config parses");
        assert_eq!(again.points(), config.points());
    }
});
