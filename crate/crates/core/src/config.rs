//! Flat `key = value` configuration files.
//!
//! ```text
//! # sampler
//! chains = 4
//! iters = 5000
//! nu_grid = 2, 4, 8, 16
//! sigma_scale = 0.5
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Keys may not repeat.

use crate::error::{Error, Result};
use crate::sampler::SamplerConfig;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
    /// One-based line number, for error messages.
    pub line: usize,
}

pub fn parse_config(text: &str) -> Result<Vec<ConfigEntry>> {
    let mut entries: Vec<ConfigEntry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(Error::Config { line, msg: format!("expected key = value, got {trimmed:?}") });
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(Error::Config { line, msg: format!("invalid key {key:?}") });
        }
        if value.is_empty() {
            return Err(Error::Config { line, msg: format!("missing value for {key}") });
        }
        let key = key.replace('-', "_");
        if let Some(prev) = entries.iter().find(|e| e.key == key) {
            return Err(Error::Config { line, msg: format!("{key} already set on line {}", prev.line) });
        }
        entries.push(ConfigEntry { key, value: value.to_string(), line });
    }
    Ok(entries)
}

/// Keys understood by [`apply_sampler_key`].
pub const SAMPLER_KEYS: &[&str] = &["chains", "iters", "burn", "thin", "target_accept", "nu_grid", "rho_grid"];

fn parse_number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{key}: cannot parse {value:?}")))
}

/// Comma-separated list of finite numbers.
pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|tok| {
            let x: f64 = parse_number(key, tok.trim())?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(Error::InvalidArgument(format!("{key}: {x} is not finite")))
            }
        })
        .collect()
}

/// Set one sampler option by key; returns `false` for keys it does not know.
pub fn apply_sampler_key(config: &mut SamplerConfig, key: &str, value: &str) -> Result<bool> {
    match key {
        "chains" => config.n_chains = parse_number(key, value)?,
        "iters" => config.n_iter = parse_number(key, value)?,
        "burn" => config.n_burn = parse_number(key, value)?,
        "thin" => config.thin = parse_number(key, value)?,
        "target_accept" => config.target_accept = parse_number(key, value)?,
        "nu_grid" => config.nu_grid = parse_list(key, value)?,
        "rho_grid" => config.rho_grid = parse_list(key, value)?,
        _ => return Ok(false),
    }
    Ok(true)
}
