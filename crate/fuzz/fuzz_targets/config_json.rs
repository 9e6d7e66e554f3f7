#![no_main]
use libfuzzer_sys::fuzz_target;
use loggas::io::{parse_config_json, write_config_json};

fuzz_target!(|data: &str| {
    if let Ok(config) = parse_config_json(data) {
        let again = parse_config_json(&write_config_json(&config)).expect("written config parses");
        assert_eq!(again.points(), config.points());
    }
});
