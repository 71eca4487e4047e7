#![allow(dead_code)]

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use ipstem::corpus::{read_prefix_table, IngestOptions};
use ipstem::FrequencyModel;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

pub fn prefix_model(name: &str) -> FrequencyModel {
    let file = File::open(fixture(name)).expect("fixture exists");
    read_prefix_table(BufReader::new(file), &IngestOptions::new(name)).expect("fixture loads")
}

pub fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}
