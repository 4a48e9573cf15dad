#![no_main]

use std::path::Path;

use cclkit_core::parse::decode_utf8;
use cclkit_core::schedule::parse_oracle_file;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let origin = Path::new("fuzz");
    if let Ok(text) = decode_utf8(data, origin) {
        let _ = parse_oracle_file(text, origin);
    }
});
