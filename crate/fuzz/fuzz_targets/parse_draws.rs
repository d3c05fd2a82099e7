#![no_main]

use libfuzzer_sys::fuzz_target;
use lgt_core::io::{parse_draws, write_draws};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_draws(text) {
        assert!(rows.iter().all(|r| r.values.iter().all(|v| v.is_finite())));
        let mut out = Vec::new();
        write_draws(&mut out, &rows).unwrap();
        let again = parse_draws(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(rows, again);
    }
});
