//! The LGT and SGT models: recursions, likelihood, priors and the
//! unconstrained parameterization used by the samplers.
//!
//! Both models share the global power-law trend `gamma * l^rho`, Student-t
//! errors and the heteroscedastic scale `sigma * yhat^tau + xi`. LGT adds a
//! damped local trend `lambda * b`; SGT replaces it with multiplicative
//! seasonality.

mod lgt;
mod prior;
mod sgt;
mod transform;

use std::fmt::Debug;

pub use lgt::{
    generalized_trend_one_step, lgt_error_scale, lgt_forward, lgt_one_step, LgtModel, LgtParams,
    LgtState,
};
pub use prior::{ParamBounds, PriorConfig, Priors, PRIOR_KEYS};
pub use sgt::{sgt_forward, SgtModel, SgtParams, SgtState};
pub use transform::{normalize_seasonal, seasonal_from_free, seasonal_to_free, Bound};

use crate::error::Result;
use crate::rand_dist::RngState;

/// Levels and one-step predictions never drop below this floor.
pub const LEVEL_FLOOR: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Lgt,
    Sgt,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Lgt => "lgt",
            ModelKind::Sgt => "sgt",
        }
    }
}

/// Filtered state sequences and log-likelihood of one pass over the data.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ForwardPass {
    /// One-step predictions for `y_2..y_n`.
    pub yhat: Vec<f64>,
    /// Error scales for `y_2..y_n`.
    pub sigma_hat: Vec<f64>,
    /// Levels `l_1..l_n`.
    pub levels: Vec<f64>,
    /// Local trends `b_1..b_n` (LGT only).
    pub trends: Vec<f64>,
    /// Seasonal factors `s_1..s_{n+m}` (SGT only).
    pub seasonal: Vec<f64>,
    pub loglik: f64,
}

/// A fitted-by-sampling state space model over a fixed training series.
///
/// Implementations hold the data and resolved priors; parameters travel
/// separately so draws can be evaluated, transformed and simulated from
/// without copying the series.
pub trait Model: Sync {
    type Params: Clone + Debug + PartialEq + Send + Sync;
    type State: Clone + Debug + Send + Sync;

    fn kind(&self) -> ModelKind;
    fn data(&self) -> &[f64];
    fn priors(&self) -> &Priors;

    /// Names of the flat parameter representation used in draw files.
    fn param_names(&self) -> Vec<String>;
    fn flatten(&self, params: &Self::Params) -> Vec<f64>;
    fn unflatten(&self, values: &[f64]) -> Result<Self::Params>;

    /// Dimension of the unconstrained vector.
    fn dim(&self) -> usize;
    fn to_unconstrained(&self, params: &Self::Params) -> Result<Vec<f64>>;
    /// Parameters and `log |det J|` of the inverse map.
    fn from_unconstrained(&self, u: &[f64]) -> Result<(Self::Params, f64)>;

    fn in_bounds(&self, params: &Self::Params) -> bool;
    /// Sum of log prior densities; `-inf` outside any box.
    fn log_prior(&self, params: &Self::Params) -> f64;
    /// Data log-likelihood; `-inf` when the recursion breaks down.
    fn log_likelihood(&self, params: &Self::Params) -> f64;

    /// Deterministic, data-informed starting point.
    fn initial_params(&self) -> Self::Params;
    fn sample_prior(&self, rng: &mut RngState) -> Result<Self::Params>;

    /// State after filtering the whole series, the starting point of
    /// forecast simulation.
    fn final_state(&self, params: &Self::Params) -> Result<Self::State>;
    /// Simulate one future path of length `out.len()` into `out`.
    fn simulate_path(
        &self,
        params: &Self::Params,
        state: &Self::State,
        rng: &mut RngState,
        out: &mut [f64],
    ) -> Result<()>;

    /// Log posterior density on the unconstrained scale, Jacobian included.
    fn log_target(&self, u: &[f64]) -> f64 {
        match self.from_unconstrained(u) {
            Ok((p, log_jac)) => {
                let prior = self.log_prior(&p);
                if prior == f64::NEG_INFINITY {
                    return prior;
                }
                let value = prior + self.log_likelihood(&p) + log_jac;
                if value.is_nan() {
                    f64::NEG_INFINITY
                } else {
                    value
                }
            }
            Err(_) => f64::NEG_INFINITY,
        }
    }
}

/// Mean of the first `min(5, n - 1)` first differences.
pub(crate) fn initial_trend(y: &[f64]) -> f64 {
    let k = 5.min(y.len().saturating_sub(1));
    if k == 0 {
        return 0.0;
    }
    (y[k] - y[0]) / k as f64
}
