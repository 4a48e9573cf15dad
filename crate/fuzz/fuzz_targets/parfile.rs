#![no_main]

use std::path::Path;

use cclkit_core::parse::{parse_bytes, Dialect};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = parse_bytes(Dialect::ParameterFile, data, Path::new("fuzz"));
});
