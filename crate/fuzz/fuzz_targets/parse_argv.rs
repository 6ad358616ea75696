#![no_main]

use delay_logistic::io::parse_config;
use libfuzzer_sys::fuzz_target;

// Arguments are NUL-separated; `--config` is dropped so no file is read.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let args: Vec<&str> = text.split('\0').filter(|a| !a.starts_with("--config")).collect();
    let _ = parse_config(std::iter::once("dlogistic").chain(args));
});
