//! Replays the checked-in fuzz corpora through the parsers on stable.

use std::fs;
use std::path::PathBuf;

use delay_logistic::io::{parse_config, parse_config_file, parse_kernel_spec};

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| fs::read(entry.unwrap().path()).unwrap())
        .collect();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out.sort();
    out
}

#[test]
fn kernel_seeds() {
    let mut accepted = 0;
    for seed in seeds("parse_kernel") {
        let text = String::from_utf8(seed).unwrap();
        if let Ok(kernel) = parse_kernel_spec(&text) {
            assert_eq!(parse_kernel_spec(&kernel.to_string()).unwrap(), kernel);
            accepted += 1;
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn config_file_seeds() {
    let mut accepted = 0;
    for seed in seeds("parse_config_file") {
        let text = String::from_utf8(seed).unwrap();
        if let Ok(file) = parse_config_file(&text) {
            let again = parse_config_file(&file.to_toml()).unwrap();
            assert_eq!(again, file);
            accepted += 1;
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn argv_seeds() {
    let mut accepted = 0;
    for seed in seeds("parse_argv") {
        let text = String::from_utf8(seed).unwrap();
        let args = text.split('\0').filter(|a| !a.starts_with("--config"));
        if parse_config(std::iter::once("dlogistic").chain(args)).is_ok() {
            accepted += 1;
        }
    }
    assert!(accepted >= 3);
}
