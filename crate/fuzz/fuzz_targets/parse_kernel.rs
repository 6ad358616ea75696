#![no_main]

use delay_logistic::io::parse_kernel_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(kernel) = parse_kernel_spec(text) {
        assert_eq!(parse_kernel_spec(&kernel.to_string()).unwrap(), kernel);
    }
});
