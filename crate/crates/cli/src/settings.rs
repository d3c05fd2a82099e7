use lgt_core::config::{apply_sampler_key, parse_config, SAMPLER_KEYS};
use lgt_core::eval::{Backend, ForecastConfig, ModelChoice};
use lgt_core::forecast::parse_quantiles;
use lgt_core::io::read_to_string;
use lgt_core::model::PRIOR_KEYS;
use lgt_core::{Error, Result};

use crate::args::Common;

/// Keys accepted in a config file besides the sampler and prior keys.
pub const RUN_KEYS: &[&str] = &[
    "model", "backend", "paths", "seed", "jobs", "quantiles", "homoscedastic", "damping_min", "damping_max",
];

pub const DEFAULT_SEED: u64 = 1;

/// Fully resolved settings for one command.
#[derive(Debug, Clone)]
pub struct Settings {
    pub forecast: ForecastConfig,
    pub model: ModelChoice,
    pub seed: u64,
    pub jobs: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            forecast: ForecastConfig::default(),
            model: ModelChoice::Auto,
            seed: DEFAULT_SEED,
            jobs: None,
        }
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{key}: cannot parse {value:?}")))
}

impl Settings {
    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        if apply_sampler_key(&mut self.forecast.sampler, key, value)? {
            return Ok(());
        }
        if PRIOR_KEYS.contains(&key) {
            return self.forecast.priors.set(key, value);
        }
        match key {
            "model" => self.model = value.parse()?,
            "backend" => self.forecast.backend = value.parse()?,
            "paths" => self.forecast.n_paths = number(key, value)?,
            "seed" => self.seed = number(key, value)?,
            "jobs" => self.jobs = Some(number(key, value)?),
            "quantiles" => self.forecast.levels = parse_quantiles(value)?,
            "homoscedastic" => {
                self.forecast.homoscedastic = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(Error::InvalidArgument(format!("{key}: expected a boolean, got {value:?}"))),
                }
            }
            "damping_min" => self.forecast.ets.damping.lo = number(key, value)?,
            "damping_max" => self.forecast.ets.damping.hi = number(key, value)?,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown key {key:?}; known keys are {}, {} and {}",
                    RUN_KEYS.join(", "),
                    SAMPLER_KEYS.join(", "),
                    PRIOR_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Defaults, overridden by the config file, overridden by flags.
    pub fn resolve(common: &Common) -> Result<Self> {
        let mut s = Self::default();
        if let Some(path) = &common.config {
            for entry in parse_config(&read_to_string(path)?)? {
                s.apply(&entry.key, &entry.value).map_err(|e| Error::Config {
                    line: entry.line,
                    msg: e.to_string(),
                })?;
            }
        }
        if let Some(m) = common.model {
            s.model = m;
        }
        if let Some(b) = common.backend {
            s.forecast.backend = b;
        }
        let sampler = &mut s.forecast.sampler;
        if let Some(v) = common.chains {
            sampler.n_chains = v;
        }
        if let Some(v) = common.iters {
            sampler.n_iter = v;
        }
        if let Some(v) = common.burn {
            sampler.n_burn = v;
        }
        if let Some(v) = common.thin {
            sampler.thin = v;
        }
        if let Some(v) = common.paths {
            s.forecast.n_paths = v;
        }
        if let Some(v) = common.seed {
            s.seed = v;
        }
        if let Some(v) = common.jobs {
            s.jobs = Some(v);
        }
        if let Some(q) = &common.quantiles {
            s.forecast.levels = parse_quantiles(q)?;
        }
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        self.forecast.sampler.validate()?;
        if self.forecast.n_paths == 0 {
            return Err(Error::InvalidArgument("paths must be positive".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidArgument("jobs must be positive".into()));
        }
        if !self.forecast.ets.damping.is_valid() {
            return Err(Error::InvalidArgument("damping bounds are not a valid interval".into()));
        }
        if self.forecast.backend == Backend::Gibbs && self.model == ModelChoice::Sgt {
            return Err(Error::InvalidArgument("the gibbs backend supports only non-seasonal models".into()));
        }
        Ok(())
    }
}
