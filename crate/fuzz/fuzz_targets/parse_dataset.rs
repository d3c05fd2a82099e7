#![no_main]

use libfuzzer_sys::fuzz_target;
use lgt_core::io::{parse_dataset, write_dataset};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(series) = parse_dataset(text) {
        let mut out = Vec::new();
        write_dataset(&mut out, &series).unwrap();
        let again = parse_dataset(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(series, again);
    }
});
