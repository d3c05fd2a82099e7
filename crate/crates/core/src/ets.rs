//! Classical exponential smoothing baselines: the damped additive trend
//! model (AAdN) and multiplicative Holt-Winters, fitted by maximum
//! likelihood with Gaussian errors.

use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;

use crate::error::{Error, Result};
use crate::forecast::{aggregate_quantiles, ForecastDistribution, PathMatrix, DEFAULT_LEVELS};
use crate::model::{normalize_seasonal, seasonal_from_free, seasonal_to_free, Bound};
use crate::rand_dist::{sample_standard_normal, RngState};

/// Smoothing parameters, initial states and error scale.
///
/// Non-seasonal models leave `s_init` empty and ignore `zeta`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtsParams {
    pub alpha: f64,
    pub beta: f64,
    pub phi: f64,
    pub zeta: f64,
    pub l1: f64,
    pub b1: f64,
    /// Factors `s_{2-m}..s_1`, the ones in effect before the second
    /// observation.
    pub s_init: Vec<f64>,
    pub sigma: f64,
}

impl EtsParams {
    pub fn aadn(alpha: f64, beta: f64, phi: f64, l1: f64, b1: f64, sigma: f64) -> Self {
        Self {
            alpha,
            beta,
            phi,
            zeta: 0.0,
            l1,
            b1,
            s_init: Vec::new(),
            sigma,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn holt_winters(
        alpha: f64,
        beta: f64,
        phi: f64,
        zeta: f64,
        l1: f64,
        b1: f64,
        s_init: Vec<f64>,
        sigma: f64,
    ) -> Self {
        Self {
            alpha,
            beta,
            phi,
            zeta,
            l1,
            b1,
            s_init,
            sigma,
        }
    }

    pub fn is_seasonal(&self) -> bool {
        !self.s_init.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &'static str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::param(name, format!("{x} outside [0, 1]")))
            }
        };
        unit("alpha", self.alpha)?;
        unit("beta", self.beta)?;
        unit("phi", self.phi)?;
        if self.is_seasonal() {
            unit("zeta", self.zeta)?;
            if self.s_init.len() < 2 {
                return Err(Error::param("s_init", "seasonal models need m > 1"));
            }
            if self.s_init.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
                return Err(Error::param("s_init", "factors must be positive"));
            }
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::param("sigma", format!("{} is not a valid scale", self.sigma)));
        }
        if !(self.l1.is_finite() && self.b1.is_finite()) {
            return Err(Error::param("l1", "initial states must be finite"));
        }
        Ok(())
    }
}

/// Level, trend and the last `m` seasonal factors `s_{n-m+1}..s_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtsState {
    pub level: f64,
    pub trend: f64,
    pub seasonal: Vec<f64>,
}

/// Output of a filtering pass.
#[derive(Debug, Clone, PartialEq)]
pub struct EtsFilter {
    /// One-step predictions for `y_2..y_n`.
    pub predictions: Vec<f64>,
    pub state: EtsState,
    pub loglik: f64,
}

fn gaussian_loglik(y: &[f64], predictions: &[f64], sigma: f64) -> f64 {
    let n = predictions.len() as f64;
    let sse: f64 = y[1..]
        .iter()
        .zip(predictions)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    -0.5 * n * (2.0 * std::f64::consts::PI * sigma * sigma).ln() - 0.5 * sse / (sigma * sigma)
}

/// Run the damped additive trend recursions over `y`.
pub fn aadn_filter(y: &[f64], params: &EtsParams) -> Result<EtsFilter> {
    params.validate()?;
    if params.is_seasonal() {
        return Err(Error::param("s_init", "AAdN is non-seasonal"));
    }
    if y.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 observations".into()));
    }
    let EtsParams { alpha, beta, phi, .. } = *params;
    let mut level = params.l1;
    let mut trend = params.b1;
    let mut predictions = Vec::with_capacity(y.len() - 1);
    for (t, &obs) in y.iter().enumerate().skip(1) {
        let damped = phi * trend;
        let yhat = level + damped;
        let next = alpha * obs + (1.0 - alpha) * (level + damped);
        trend = beta * (next - level) + (1.0 - beta) * damped;
        level = next;
        if !(yhat.is_finite() && level.is_finite() && trend.is_finite()) {
            return Err(Error::NonFiniteRecursion { t: t + 1 });
        }
        predictions.push(yhat);
    }
    let loglik = gaussian_loglik(y, &predictions, params.sigma);
    Ok(EtsFilter {
        predictions,
        state: EtsState {
            level,
            trend,
            seasonal: Vec::new(),
        },
        loglik,
    })
}

/// Point forecasts `l + (phi + ... + phi^k) b` for `k = 1..=h`.
pub fn aadn_forecast(state: &EtsState, params: &EtsParams, h: usize) -> Result<Vec<f64>> {
    params.validate()?;
    let mut damp = 0.0;
    let mut power = 1.0;
    Ok((0..h)
        .map(|_| {
            power *= params.phi;
            damp += power;
            state.level + damp * state.trend
        })
        .collect())
}

/// Run the multiplicative Holt-Winters recursions over `y`.
pub fn hw_mult_filter(y: &[f64], params: &EtsParams) -> Result<EtsFilter> {
    params.validate()?;
    let m = params.s_init.len();
    if m < 2 {
        return Err(Error::param("s_init", "Holt-Winters needs m > 1 initial factors"));
    }
    if y.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 observations".into()));
    }
    let EtsParams { alpha, beta, phi, zeta, .. } = *params;
    let mut level = params.l1;
    let mut trend = params.b1;
    // ring[(t - 1) % m] holds s_{t-m} when predicting y_t (1-based)
    let mut ring = params.s_init.clone();
    let mut predictions = Vec::with_capacity(y.len() - 1);
    for (t, &obs) in y.iter().enumerate().skip(1) {
        let slot = (t - 1) % m;
        let season = ring[slot];
        let damped = phi * trend;
        let yhat = (level + damped) * season;
        let next = alpha * obs / season + (1.0 - alpha) * (level + damped);
        trend = beta * (next - level) + (1.0 - beta) * damped;
        level = next;
        ring[slot] = zeta * obs / level + (1.0 - zeta) * season;
        if !(yhat.is_finite() && level.is_finite() && trend.is_finite() && ring[slot].is_finite()) {
            return Err(Error::NonFiniteRecursion { t: t + 1 });
        }
        predictions.push(yhat);
    }
    // Rotate so seasonal[0] is the factor for the first forecast step.
    let start = (y.len() - 1) % m;
    let seasonal: Vec<f64> = (0..m).map(|k| ring[(start + k) % m]).collect();
    let loglik = gaussian_loglik(y, &predictions, params.sigma);
    Ok(EtsFilter {
        predictions,
        state: EtsState {
            level,
            trend,
            seasonal,
        },
        loglik,
    })
}

/// Point forecasts reusing the last `m` factors cyclically.
pub fn hw_mult_forecast(state: &EtsState, params: &EtsParams, h: usize) -> Result<Vec<f64>> {
    if state.seasonal.is_empty() {
        return Err(Error::param("s_init", "state carries no seasonal factors"));
    }
    let trend_part = aadn_forecast(state, params, h)?;
    Ok(trend_part
        .iter()
        .enumerate()
        .map(|(k, v)| v * state.seasonal[k % state.seasonal.len()])
        .collect())
}

/// Filter with whichever recursion the parameters describe.
pub fn ets_filter(y: &[f64], params: &EtsParams) -> Result<EtsFilter> {
    if params.is_seasonal() {
        hw_mult_filter(y, params)
    } else {
        aadn_filter(y, params)
    }
}

pub fn ets_forecast(state: &EtsState, params: &EtsParams, h: usize) -> Result<Vec<f64>> {
    if params.is_seasonal() {
        hw_mult_forecast(state, params, h)
    } else {
        aadn_forecast(state, params, h)
    }
}

/// Settings for [`mle_fit_ets`].
#[derive(Debug, Clone, PartialEq)]
pub struct EtsOptions {
    /// Box for the damping factor.
    pub damping: Bound,
    pub max_iters: u64,
}

impl Default for EtsOptions {
    fn default() -> Self {
        Self {
            damping: Bound::new(0.8, 0.98),
            max_iters: 4000,
        }
    }
}

impl EtsOptions {
    /// Damping anywhere in `(0, 1]`.
    pub fn wide_damping() -> Self {
        Self {
            damping: Bound::new(0.0, 1.0),
            ..Self::default()
        }
    }
}

/// Smoothing starts tried by the multi-start search: (alpha, beta, phi, zeta)
/// as fractions of each box.
const STARTS: [[f64; 4]; 4] = [
    [0.5, 0.1, 0.5, 0.1],
    [0.2, 0.05, 0.8, 0.05],
    [0.8, 0.3, 0.2, 0.3],
    [0.05, 0.01, 0.9, 0.2],
];

struct Objective<'a> {
    y: &'a [f64],
    m: usize,
    scale: f64,
    damping: Bound,
    variance_floor: f64,
}

impl Objective<'_> {
    fn decode(&self, theta: &[f64]) -> EtsParams {
        let unit = |u: f64| Bound::UNIT.from_unconstrained(u).0;
        let phi = self.damping.from_unconstrained(theta[2]).0;
        if self.m > 1 {
            EtsParams::holt_winters(
                unit(theta[0]),
                unit(theta[1]),
                phi,
                unit(theta[3]),
                self.scale * theta[4],
                self.scale * theta[5],
                seasonal_from_free(&theta[6..]),
                0.0,
            )
        } else {
            EtsParams::aadn(
                unit(theta[0]),
                unit(theta[1]),
                phi,
                self.scale * theta[3],
                self.scale * theta[4],
                0.0,
            )
        }
    }

    /// Negative profile log-likelihood up to a constant, with sigma
    /// concentrated out.
    fn value(&self, theta: &[f64]) -> f64 {
        let params = self.decode(theta);
        match ets_filter(self.y, &params) {
            Ok(fit) => {
                let n = fit.predictions.len() as f64;
                let sse: f64 = self.y[1..]
                    .iter()
                    .zip(&fit.predictions)
                    .map(|(a, p)| (a - p) * (a - p))
                    .sum();
                let v = 0.5 * n * (sse / n + self.variance_floor).ln();
                if v.is_finite() {
                    v
                } else {
                    f64::INFINITY
                }
            }
            Err(_) => f64::INFINITY,
        }
    }
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, theta: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.value(theta))
    }
}

/// Maximum likelihood fit of AAdN (`seasonal = false`) or multiplicative
/// Holt-Winters (`seasonal = true`, period from the series).
///
/// Smoothing parameters and initial states are estimated jointly by
/// Nelder-Mead on logit/scaled coordinates, restarted from several starting
/// points; sigma is profiled out and set to the residual RMS.
pub fn mle_fit_ets(y: &[f64], period: usize, seasonal: bool, options: &EtsOptions) -> Result<EtsParams> {
    let m = if seasonal { period } else { 1 };
    if seasonal && m < 2 {
        return Err(Error::InvalidArgument("seasonal fit needs a period > 1".into()));
    }
    if y.len() < 3 || (seasonal && y.len() < 2 * m) {
        return Err(Error::InvalidArgument(format!(
            "too few observations ({}) for ETS fitting",
            y.len()
        )));
    }
    if seasonal && y.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidArgument("multiplicative seasonality needs positive data".into()));
    }
    let mean_abs = y.iter().map(|v| v.abs()).sum::<f64>() / y.len() as f64;
    let scale = mean_abs.max(1e-8);
    let objective = Objective {
        y,
        m,
        scale,
        damping: options.damping,
        variance_floor: (1e-8 * scale).powi(2),
    };

    // Heuristic initial states.
    let (l0, b0, s0) = if seasonal {
        let first = y[..m].iter().sum::<f64>() / m as f64;
        let second = if y.len() >= 2 * m {
            y[m..2 * m].iter().sum::<f64>() / m as f64
        } else {
            first
        };
        let mut s: Vec<f64> = y[..m].iter().map(|v| v / first).collect();
        normalize_seasonal(&mut s);
        // s_init holds s_{2-m}..s_1: rotate the first-cycle ratios so the
        // factor for y_2 comes first.
        s.rotate_left(1);
        (first, (second - first) / m as f64, s)
    } else {
        let diffs = (y.len() - 1).min(5);
        (y[0], (y[diffs] - y[0]) / diffs as f64, Vec::new())
    };
    let free_s = if seasonal { seasonal_to_free(&s0)? } else { Vec::new() };

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut converged_any = false;
    for start in STARTS {
        let mut theta = vec![
            Bound::UNIT.to_unconstrained("alpha", start[0])?,
            Bound::UNIT.to_unconstrained("beta", start[1])?,
            options
                .damping
                .to_unconstrained("phi", options.damping.lo + start[2] * (options.damping.hi - options.damping.lo))?,
        ];
        if seasonal {
            theta.push(Bound::UNIT.to_unconstrained("zeta", start[3])?);
        }
        theta.push(l0 / scale);
        theta.push(b0 / scale);
        theta.extend(&free_s);

        // Two passes: the second restarts the simplex around the first
        // optimum, which guards against premature collapse.
        for _ in 0..2 {
            let (cost, point, converged) = nelder_mead(&objective, &theta, options.max_iters)?;
            converged_any |= converged;
            theta = point.clone();
            if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                best = Some((cost, point));
            }
        }
    }
    let (best_cost, theta) = best.expect("at least one start");
    let mut params = objective.decode(&theta);
    let fit = ets_filter(y, &params)?;
    let n = fit.predictions.len() as f64;
    let sse: f64 = y[1..]
        .iter()
        .zip(&fit.predictions)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    params.sigma = (sse / n + objective.variance_floor).sqrt();
    if !converged_any || !best_cost.is_finite() {
        return Err(Error::NoConvergence {
            restarts: STARTS.len(),
            best_objective: best_cost,
            best: Box::new(params),
        });
    }
    Ok(params)
}

fn nelder_mead(objective: &Objective, start: &[f64], max_iters: u64) -> Result<(f64, Vec<f64>, bool)> {
    let step = |i: usize| if i < 3 || (objective.m > 1 && i == 3) { 0.5 } else { 0.1 };
    let mut simplex = vec![start.to_vec()];
    for i in 0..start.len() {
        let mut v = start.to_vec();
        v[i] += step(i);
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-10)
        .map_err(|e| Error::Sampler(e.to_string()))?;
    let res = Executor::new(
        Objective {
            y: objective.y,
            m: objective.m,
            scale: objective.scale,
            damping: objective.damping,
            variance_floor: objective.variance_floor,
        },
        solver,
    )
    .configure(|state| state.max_iters(max_iters))
    .run()
    .map_err(|e| Error::Sampler(format!("Nelder-Mead: {e}")))?;
    let state = res.state();
    let converged = matches!(
        state.get_termination_status(),
        TerminationStatus::Terminated(TerminationReason::SolverConverged)
    );
    let point = state
        .get_best_param()
        .cloned()
        .unwrap_or_else(|| start.to_vec());
    Ok((state.get_best_cost(), point, converged))
}

/// Simulate Gaussian-error paths through the fitted recursions and summarize
/// them with the default quantile levels.
pub fn ets_simulate_intervals(
    state: &EtsState,
    params: &EtsParams,
    h: usize,
    n_paths: usize,
    rng: &mut RngState,
) -> Result<ForecastDistribution> {
    if n_paths < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 paths, got {n_paths}")));
    }
    let paths = ets_simulate_paths(state, params, h, n_paths, rng)?;
    aggregate_quantiles(&paths, &DEFAULT_LEVELS)
}

/// Gaussian-error sample paths from the final filtered state.
pub fn ets_simulate_paths(
    state: &EtsState,
    params: &EtsParams,
    h: usize,
    n_paths: usize,
    rng: &mut RngState,
) -> Result<PathMatrix> {
    if n_paths == 0 || h == 0 {
        return Err(Error::InvalidArgument("need at least one path and one step".into()));
    }
    params.validate()?;
    let m = state.seasonal.len();
    let mut paths = PathMatrix::zeros(n_paths, h);
    for p in 0..n_paths {
        let mut level = state.level;
        let mut trend = state.trend;
        let mut seasonal = state.seasonal.clone();
        let row = paths.row_mut(p);
        for (k, slot) in row.iter_mut().enumerate() {
            let damped = params.phi * trend;
            let season = if m > 0 { seasonal[k % m] } else { 1.0 };
            let yhat = (level + damped) * season;
            let draw = yhat + params.sigma * sample_standard_normal(rng);
            let next = params.alpha * draw / season + (1.0 - params.alpha) * (level + damped);
            trend = params.beta * (next - level) + (1.0 - params.beta) * damped;
            level = next;
            if m > 0 {
                seasonal[k % m] = params.zeta * draw / level + (1.0 - params.zeta) * season;
            }
            *slot = draw;
        }
    }
    Ok(paths)
}
