#![no_main]

use libfuzzer_sys::fuzz_target;
use lgt_core::config::{apply_sampler_key, parse_config};
use lgt_core::model::PriorConfig;
use lgt_core::sampler::SamplerConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(entries) = parse_config(text) else {
        return;
    };
    for (i, e) in entries.iter().enumerate() {
        assert!(!e.key.is_empty() && !e.key.contains('-'));
        assert!(entries[..i].iter().all(|p| p.key != e.key && p.line < e.line));
    }
    let mut sampler = SamplerConfig::default();
    let mut priors = PriorConfig::default();
    for e in &entries {
        if !matches!(apply_sampler_key(&mut sampler, &e.key, &e.value), Ok(true)) {
            let _ = priors.set(&e.key, &e.value);
        }
    }
    let _ = sampler.validate();
});
