use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ets::{ets_filter, ets_simulate_paths, mle_fit_ets, EtsOptions, EtsParams};
use crate::forecast::{aggregate_quantiles, simulate_paths, ForecastDistribution, DEFAULT_LEVELS, DEFAULT_PATHS};
use crate::io::DrawRow;
use crate::model::{LgtModel, LgtParams, Model, PriorConfig, SgtModel, SgtParams};
use crate::rand_dist::RngState;
use crate::sampler::{fit_gibbs_lgt, fit_mwg, ParamSummary, PosteriorDraws, SamplerConfig};
use crate::series::{PositiveShift, TimeSeries};

/// Model selection. `Auto` picks LGT for non-seasonal series and SGT
/// otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelChoice {
    Auto,
    Lgt,
    Sgt,
    EtsAadn,
    EtsHw,
}

impl ModelChoice {
    pub const ALL: [ModelChoice; 5] = [Self::Auto, Self::Lgt, Self::Sgt, Self::EtsAadn, Self::EtsHw];

    pub fn name(self) -> &'static str {
        match self {
            Self::Auto => "auto",
            Self::Lgt => "lgt",
            Self::Sgt => "sgt",
            Self::EtsAadn => "ets-aadn",
            Self::EtsHw => "ets-hw",
        }
    }

    /// The concrete model used for `series`.
    pub fn resolve(self, series: &TimeSeries) -> Result<ModelChoice> {
        let m = series.frequency();
        let resolved = match self {
            Self::Auto if m > 1 => Self::Sgt,
            Self::Auto => Self::Lgt,
            other => other,
        };
        if matches!(resolved, Self::Sgt | Self::EtsHw) && m < 2 {
            return Err(Error::InvalidSeries {
                id: series.id().to_string(),
                msg: format!("{} needs a seasonal series, frequency is {m}", resolved.name()),
            });
        }
        Ok(resolved)
    }
}

impl fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown model {s:?} (expected auto, lgt, sgt, ets-aadn or ets-hw)")))
    }
}

/// MCMC backend for the Bayesian models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    /// Adaptive Metropolis-within-Gibbs on the full model.
    #[default]
    Mwg,
    /// Conjugate Gibbs on the homoscedastic LGT model.
    Gibbs,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Self::Mwg => "mwg",
            Self::Gibbs => "gibbs",
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mwg" => Ok(Self::Mwg),
            "gibbs" => Ok(Self::Gibbs),
            _ => Err(Error::InvalidArgument(format!("unknown backend {s:?} (expected mwg or gibbs)"))),
        }
    }
}

/// Everything needed to turn a training series into a forecast distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastConfig {
    pub sampler: SamplerConfig,
    pub priors: PriorConfig,
    pub backend: Backend,
    /// Fit LGT with `tau = xi = 0` under the MWG backend too. The Gibbs
    /// backend always does.
    pub homoscedastic: bool,
    pub n_paths: usize,
    pub levels: Vec<f64>,
    pub ets: EtsOptions,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        Self {
            sampler: SamplerConfig::default(),
            priors: PriorConfig::default(),
            backend: Backend::Mwg,
            homoscedastic: false,
            n_paths: DEFAULT_PATHS,
            levels: DEFAULT_LEVELS.to_vec(),
            ets: EtsOptions::default(),
        }
    }
}

impl ForecastConfig {
    pub fn forecaster(self, choice: ModelChoice) -> ModelForecaster {
        ModelForecaster { config: self, choice }
    }
}

/// Produces a forecast distribution for the series' own horizon.
///
/// Implementations must be deterministic given the RNG state.
pub trait Forecaster: Sync {
    /// Name of the model that will be used for `series`.
    fn route(&self, series: &TimeSeries) -> Result<&'static str>;
    fn forecast(&self, series: &TimeSeries, rng: &mut RngState) -> Result<ForecastDistribution>;
}

/// Fitted state of one series: posterior draws or ETS point estimates.
#[derive(Debug, Clone)]
pub enum Fitted {
    Lgt { model: LgtModel, draws: PosteriorDraws<LgtParams> },
    Sgt { model: SgtModel, draws: PosteriorDraws<SgtParams> },
    Ets { params: EtsParams },
}

/// A fitted series, on the shifted scale the model saw.
#[derive(Debug, Clone)]
pub struct Fit {
    pub id: String,
    pub model: ModelChoice,
    pub shift: PositiveShift,
    /// Training values after the shift.
    pub values: Vec<f64>,
    pub fitted: Fitted,
}

const ETS_NAMES: [&str; 7] = ["alpha", "beta", "phi", "zeta", "l1", "b1", "sigma"];

fn ets_flatten(p: &EtsParams) -> Vec<f64> {
    let mut v = vec![p.alpha, p.beta, p.phi, p.zeta, p.l1, p.b1, p.sigma];
    v.extend(&p.s_init);
    v
}

fn ets_unflatten(values: &[f64], period: usize, seasonal: bool) -> Result<EtsParams> {
    let expected = ETS_NAMES.len() + if seasonal { period } else { 0 };
    if values.len() != expected {
        return Err(Error::InvalidArgument(format!("ETS draw has {} values, expected {expected}", values.len())));
    }
    let s_init = values[ETS_NAMES.len()..].to_vec();
    let p = EtsParams {
        alpha: values[0],
        beta: values[1],
        phi: values[2],
        zeta: values[3],
        l1: values[4],
        b1: values[5],
        sigma: values[6],
        s_init,
    };
    p.validate()?;
    Ok(p)
}

fn draw_rows<M: Model>(id: &str, name: &str, model: &M, draws: &PosteriorDraws<M::Params>) -> Vec<DrawRow> {
    draws
        .draws
        .iter()
        .zip(draws.chain.iter().zip(&draws.iteration))
        .map(|(p, (&chain, &iteration))| DrawRow {
            id: id.to_string(),
            model: name.to_string(),
            chain,
            iteration,
            values: model.flatten(p),
        })
        .collect()
}

impl Fit {
    /// Draw-file rows: one per posterior draw, or a single row holding the
    /// ETS estimates.
    pub fn draw_rows(&self) -> Vec<DrawRow> {
        let name = self.model.name();
        match &self.fitted {
            Fitted::Lgt { model, draws } => draw_rows(&self.id, name, model, draws),
            Fitted::Sgt { model, draws } => draw_rows(&self.id, name, model, draws),
            Fitted::Ets { params } => vec![DrawRow {
                id: self.id.clone(),
                model: name.to_string(),
                chain: 0,
                iteration: 0,
                values: ets_flatten(params),
            }],
        }
    }

    /// Flat parameter names matching [`Fit::draw_rows`].
    pub fn param_names(&self) -> Vec<String> {
        match &self.fitted {
            Fitted::Lgt { model, .. } => model.param_names(),
            Fitted::Sgt { model, .. } => model.param_names(),
            Fitted::Ets { params } => ETS_NAMES
                .iter()
                .map(|s| s.to_string())
                .chain((0..params.s_init.len()).map(|i| format!("s_init[{}]", i + 1)))
                .collect(),
        }
    }

    /// Convergence summaries; `None` for ETS fits.
    pub fn summaries(&self) -> Option<Result<Vec<ParamSummary>>> {
        match &self.fitted {
            Fitted::Lgt { model, draws } => Some(draws.summarize(model)),
            Fitted::Sgt { model, draws } => Some(draws.summarize(model)),
            Fitted::Ets { .. } => None,
        }
    }

    /// Post burn-in acceptance rate per chain.
    pub fn acceptance(&self) -> &[f64] {
        match &self.fitted {
            Fitted::Lgt { draws, .. } => &draws.acceptance,
            Fitted::Sgt { draws, .. } => &draws.acceptance,
            Fitted::Ets { .. } => &[],
        }
    }
}

/// The configured forecaster for one [`ModelChoice`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModelForecaster {
    pub config: ForecastConfig,
    pub choice: ModelChoice,
}

impl ModelForecaster {
    fn prepare(&self, series: &TimeSeries) -> Result<(ModelChoice, PositiveShift, Vec<f64>)> {
        let model = self.choice.resolve(series)?;
        if self.config.backend == Backend::Gibbs && model == ModelChoice::Sgt {
            return Err(Error::InvalidArgument("the gibbs backend supports only non-seasonal models".into()));
        }
        let shift = if model == ModelChoice::EtsAadn {
            PositiveShift::for_values(&[1.0])
        } else {
            PositiveShift::for_values(series.values())
        };
        let values = shift.apply(series)?.values().to_vec();
        Ok((model, shift, values))
    }

    fn lgt_model(&self, values: &[f64]) -> Result<LgtModel> {
        if self.config.homoscedastic || self.config.backend == Backend::Gibbs {
            LgtModel::homoscedastic(values, &self.config.priors)
        } else {
            LgtModel::new(values, &self.config.priors)
        }
    }

    /// Fit the routed model to the whole series.
    pub fn fit(&self, series: &TimeSeries, rng: &mut RngState) -> Result<Fit> {
        let (model, shift, values) = self.prepare(series)?;
        let fitted = match model {
            ModelChoice::Lgt => {
                let lgt = self.lgt_model(&values)?;
                let draws = match self.config.backend {
                    Backend::Mwg => fit_mwg(&lgt, &self.config.sampler, rng)?,
                    Backend::Gibbs => fit_gibbs_lgt(&lgt, &self.config.sampler, rng)?,
                };
                Fitted::Lgt { model: lgt, draws }
            }
            ModelChoice::Sgt => {
                let sgt = SgtModel::new(&values, series.frequency(), &self.config.priors)?;
                let draws = fit_mwg(&sgt, &self.config.sampler, rng)?;
                Fitted::Sgt { model: sgt, draws }
            }
            ModelChoice::EtsAadn | ModelChoice::EtsHw => {
                let seasonal = model == ModelChoice::EtsHw;
                let params = mle_fit_ets(&values, series.frequency(), seasonal, &self.config.ets)?;
                Fitted::Ets { params }
            }
            ModelChoice::Auto => unreachable!("resolved above"),
        };
        Ok(Fit { id: series.id().to_string(), model, shift, values, fitted })
    }

    /// Rebuild a fit from draw-file rows. Rows for other series are ignored.
    pub fn fit_from_rows(&self, series: &TimeSeries, rows: &[DrawRow]) -> Result<Fit> {
        let (model, shift, values) = self.prepare(series)?;
        let mine: Vec<&DrawRow> = rows.iter().filter(|r| r.id == series.id()).collect();
        let invalid = |msg: String| Error::InvalidSeries { id: series.id().to_string(), msg };
        if mine.is_empty() {
            return Err(invalid("no draws in the draws file".into()));
        }
        if let Some(r) = mine.iter().find(|r| r.model != model.name()) {
            return Err(invalid(format!("draws are for model {}, expected {}", r.model, model.name())));
        }
        let chain: Vec<usize> = mine.iter().map(|r| r.chain).collect();
        let iteration: Vec<usize> = mine.iter().map(|r| r.iteration).collect();
        let fitted = match model {
            ModelChoice::Lgt => {
                let lgt = self.lgt_model(&values)?;
                let params = mine.iter().map(|r| lgt.unflatten(&r.values)).collect::<Result<Vec<_>>>()?;
                Fitted::Lgt { draws: PosteriorDraws::from_parts(params, chain, iteration)?, model: lgt }
            }
            ModelChoice::Sgt => {
                let sgt = SgtModel::new(&values, series.frequency(), &self.config.priors)?;
                let params = mine.iter().map(|r| sgt.unflatten(&r.values)).collect::<Result<Vec<_>>>()?;
                Fitted::Sgt { draws: PosteriorDraws::from_parts(params, chain, iteration)?, model: sgt }
            }
            ModelChoice::EtsAadn | ModelChoice::EtsHw => {
                if mine.len() != 1 {
                    return Err(invalid(format!("expected one ETS row, found {}", mine.len())));
                }
                let params = ets_unflatten(&mine[0].values, series.frequency(), model == ModelChoice::EtsHw)?;
                Fitted::Ets { params }
            }
            ModelChoice::Auto => unreachable!("resolved above"),
        };
        Ok(Fit { id: series.id().to_string(), model, shift, values, fitted })
    }

    /// Simulate `h` steps ahead of a fit and summarize on the original scale.
    pub fn simulate(&self, fit: &Fit, h: usize, rng: &mut RngState) -> Result<ForecastDistribution> {
        let n = self.config.n_paths;
        let paths = match &fit.fitted {
            Fitted::Lgt { model, draws } => simulate_paths(model, &draws.draws, h, n, rng)?,
            Fitted::Sgt { model, draws } => simulate_paths(model, &draws.draws, h, n, rng)?,
            Fitted::Ets { params } => {
                let state = ets_filter(&fit.values, params)?.state;
                ets_simulate_paths(&state, params, h, n, rng)?
            }
        };
        Ok(aggregate_quantiles(&paths, &self.config.levels)?.shifted_down(fit.shift.offset()))
    }
}

/// RNG streams used by [`ModelForecaster`]: fitting and simulation draw from
/// separate children of the caller's stream, so a forecast from saved draws
/// matches a single-shot forecast.
pub const FIT_STREAM: u64 = 0;
pub const SIMULATE_STREAM: u64 = 1;

impl Forecaster for ModelForecaster {
    fn route(&self, series: &TimeSeries) -> Result<&'static str> {
        Ok(self.choice.resolve(series)?.name())
    }

    fn forecast(&self, series: &TimeSeries, rng: &mut RngState) -> Result<ForecastDistribution> {
        let fit = self.fit(series, &mut rng.split(FIT_STREAM))?;
        self.simulate(&fit, series.horizon(), &mut rng.split(SIMULATE_STREAM))
    }
}
