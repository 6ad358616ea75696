#![no_main]

use delay_logistic::io::parse_config_file;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = parse_config_file(text) {
        let again = parse_config_file(&file.to_toml()).expect("emitted config must parse");
        assert_eq!(again.to_toml(), file.to_toml());
    }
});
