#![no_main]

use libfuzzer_sys::fuzz_target;
use lgt_core::forecast::parse_quantiles;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(levels) = parse_quantiles(text) {
        assert!(levels.iter().all(|&l| l > 0.0 && l < 1.0));
        assert!(levels.windows(2).all(|w| w[0] < w[1]));
        assert!(levels.contains(&0.5));
    }
});
