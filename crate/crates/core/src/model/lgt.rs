use super::prior::{PriorConfig, Priors};
use super::transform::Bound;
use super::{initial_trend, ForwardPass, Model, ModelKind, LEVEL_FLOOR};
use crate::error::{Error, Result};
use crate::rand_dist::{
    sample_beta, sample_student_t, student_t_log_norm, student_t_logpdf_unchecked, RngState,
};
use rand::Rng;

/// Parameters of the local and global trend model.
#[derive(Debug, Clone, PartialEq)]
pub struct LgtParams {
    /// Degrees of freedom of the Student-t errors.
    pub nu: f64,
    /// Global trend coefficient.
    pub gamma: f64,
    /// Global trend power.
    pub rho: f64,
    /// Local trend damping.
    pub lambda: f64,
    /// Level smoothing.
    pub alpha: f64,
    /// Local trend smoothing.
    pub beta: f64,
    /// Error size coefficient.
    pub sigma: f64,
    /// Error size power.
    pub tau: f64,
    /// Error size floor.
    pub xi: f64,
    /// Initial local trend.
    pub b1: f64,
    /// Initial level; fixed to the first observation.
    pub l1: f64,
}

/// Level and local trend after the last observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgtState {
    pub level: f64,
    pub trend: f64,
}

/// One-step prediction `l + gamma * l^rho + lambda * b`.
pub fn lgt_one_step(level: f64, trend: f64, params: &LgtParams) -> Result<f64> {
    if !(level >= LEVEL_FLOOR) {
        return Err(Error::param(
            "level",
            format!("{level} is below the floor {LEVEL_FLOOR}"),
        ));
    }
    Ok(one_step(level, trend, params))
}

#[inline]
fn one_step(level: f64, trend: f64, p: &LgtParams) -> f64 {
    level + p.gamma * level.powf(p.rho) + p.lambda * trend
}

/// Error scale `sigma * yhat^tau + xi`.
pub fn lgt_error_scale(yhat: f64, params: &LgtParams) -> Result<f64> {
    if !(yhat >= LEVEL_FLOOR) {
        return Err(Error::param(
            "yhat",
            format!("{yhat} is below the floor {LEVEL_FLOOR}"),
        ));
    }
    Ok(error_scale(yhat, params.sigma, params.tau, params.xi))
}

/// The power is taken of `max(yhat, floor)`, so a transiently negative
/// prediction keeps a finite scale.
#[inline]
pub(crate) fn error_scale(yhat: f64, sigma: f64, tau: f64, xi: f64) -> f64 {
    if tau == 0.0 {
        sigma + xi
    } else {
        sigma * yhat.max(LEVEL_FLOOR).powf(tau) + xi
    }
}

/// The generalized trend `l + b * l^rho`, interpolating between additive
/// (`rho = 0`) and multiplicative (`rho = 1`, `b = 1 + delta`) trends.
///
/// Provided for reference only; no model in this crate is fitted with it.
pub fn generalized_trend_one_step(level: f64, trend: f64, rho: f64) -> Result<f64> {
    if !(level >= LEVEL_FLOOR) {
        return Err(Error::param(
            "level",
            format!("{level} is below the floor {LEVEL_FLOOR}"),
        ));
    }
    Ok(level + trend * level.powf(rho))
}

/// Filter a positive series through the LGT recursions.
pub fn lgt_forward(y: &[f64], params: &LgtParams) -> Result<ForwardPass> {
    if y.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 observations, got {}",
            y.len()
        )));
    }
    if y.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidArgument("series must be strictly positive".into()));
    }
    let mut pass = ForwardPass {
        yhat: Vec::with_capacity(y.len() - 1),
        sigma_hat: Vec::with_capacity(y.len() - 1),
        levels: Vec::with_capacity(y.len()),
        trends: Vec::with_capacity(y.len()),
        ..Default::default()
    };
    pass.loglik = run(y, params, Some(&mut pass))?;
    Ok(pass)
}

fn run(y: &[f64], p: &LgtParams, mut record: Option<&mut ForwardPass>) -> Result<f64> {
    let log_norm = student_t_log_norm(p.nu);
    let mut level = p.l1.max(LEVEL_FLOOR);
    let mut trend = p.b1;
    let mut loglik = 0.0;
    if let Some(r) = record.as_deref_mut() {
        r.levels.push(level);
        r.trends.push(trend);
    }
    for (t, &obs) in y.iter().enumerate().skip(1) {
        let yhat = one_step(level, trend, p);
        let scale = error_scale(yhat, p.sigma, p.tau, p.xi);
        loglik += if scale > 0.0 {
            student_t_logpdf_unchecked(obs, p.nu, yhat, scale, log_norm)
        } else {
            // A degenerate scale is only usable for filtering.
            f64::NEG_INFINITY
        };
        let next = (p.alpha * obs + (1.0 - p.alpha) * level).max(LEVEL_FLOOR);
        trend = p.beta * (next - level) + (1.0 - p.beta) * trend;
        level = next;
        if !(yhat.is_finite() && scale >= 0.0 && trend.is_finite() && level.is_finite()) {
            return Err(Error::NonFiniteRecursion { t: t + 1 });
        }
        if let Some(r) = record.as_deref_mut() {
            r.yhat.push(yhat);
            r.sigma_hat.push(scale);
            r.levels.push(level);
            r.trends.push(trend);
        }
    }
    Ok(loglik)
}

/// LGT over one training series.
///
/// With `homoscedastic` set, `tau` and `xi` are pinned to zero and the error
/// scale is `sigma` alone; this is the slice the Gibbs backend samples.
#[derive(Debug, Clone)]
pub struct LgtModel {
    y: Vec<f64>,
    priors: Priors,
    homoscedastic: bool,
}

impl LgtModel {
    pub fn new(y: &[f64], priors: &PriorConfig) -> Result<Self> {
        Self::build(y, priors, false)
    }

    pub fn homoscedastic(y: &[f64], priors: &PriorConfig) -> Result<Self> {
        Self::build(y, priors, true)
    }

    fn build(y: &[f64], priors: &PriorConfig, homoscedastic: bool) -> Result<Self> {
        if y.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "LGT needs at least 3 observations, got {}",
                y.len()
            )));
        }
        if y.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument("series must be strictly positive".into()));
        }
        Ok(Self {
            y: y.to_vec(),
            priors: priors.resolve(y)?,
            homoscedastic,
        })
    }

    /// Use an already resolved prior set (no data-dependent defaults).
    pub fn with_priors(y: &[f64], priors: Priors, homoscedastic: bool) -> Result<Self> {
        if y.len() < 3 || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("need at least 3 finite observations".into()));
        }
        Ok(Self {
            y: y.to_vec(),
            priors,
            homoscedastic,
        })
    }

    pub fn is_homoscedastic(&self) -> bool {
        self.homoscedastic
    }

    fn boxes(&self) -> Vec<(&'static str, Bound)> {
        let b = &self.priors.bounds;
        let mut v = vec![
            ("nu", b.nu),
            ("gamma", b.gamma),
            ("rho", b.rho),
            ("lambda", b.lambda),
            ("alpha", b.alpha),
            ("beta", b.beta),
            ("sigma", b.sigma),
        ];
        if !self.homoscedastic {
            v.push(("tau", b.tau));
            v.push(("xi", b.xi));
        }
        v.push(("b1", b.b1));
        v
    }

    fn free_values(&self, p: &LgtParams) -> Vec<f64> {
        let mut v = vec![p.nu, p.gamma, p.rho, p.lambda, p.alpha, p.beta, p.sigma];
        if !self.homoscedastic {
            v.push(p.tau);
            v.push(p.xi);
        }
        v.push(p.b1);
        v
    }

    /// Filter the training data under `params`.
    pub fn forward(&self, params: &LgtParams) -> Result<ForwardPass> {
        lgt_forward(&self.y, params)
    }

    /// Log-likelihood for arbitrary data, used by the Gibbs sampler and by
    /// simulation-based tests where `y` changes between calls.
    pub(crate) fn loglik_for(y: &[f64], params: &LgtParams) -> f64 {
        run(y, params, None).unwrap_or(f64::NEG_INFINITY)
    }
}

impl Model for LgtModel {
    type Params = LgtParams;
    type State = LgtState;

    fn kind(&self) -> ModelKind {
        ModelKind::Lgt
    }

    fn data(&self) -> &[f64] {
        &self.y
    }

    fn priors(&self) -> &Priors {
        &self.priors
    }

    fn param_names(&self) -> Vec<String> {
        ["nu", "gamma", "rho", "lambda", "alpha", "beta", "sigma", "tau", "xi", "b1", "l1"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    fn flatten(&self, p: &LgtParams) -> Vec<f64> {
        vec![
            p.nu, p.gamma, p.rho, p.lambda, p.alpha, p.beta, p.sigma, p.tau, p.xi, p.b1, p.l1,
        ]
    }

    fn unflatten(&self, v: &[f64]) -> Result<LgtParams> {
        if v.len() != 11 {
            return Err(Error::InvalidArgument(format!(
                "LGT draw needs 11 values, got {}",
                v.len()
            )));
        }
        let p = LgtParams {
            nu: v[0],
            gamma: v[1],
            rho: v[2],
            lambda: v[3],
            alpha: v[4],
            beta: v[5],
            sigma: v[6],
            tau: v[7],
            xi: v[8],
            b1: v[9],
            l1: v[10],
        };
        if !self.in_bounds(&p) {
            return Err(Error::InvalidArgument(format!("LGT draw outside its boxes: {p:?}")));
        }
        Ok(p)
    }

    fn dim(&self) -> usize {
        if self.homoscedastic {
            8
        } else {
            10
        }
    }

    fn to_unconstrained(&self, p: &LgtParams) -> Result<Vec<f64>> {
        self.boxes()
            .iter()
            .zip(self.free_values(p))
            .map(|((name, b), x)| b.to_unconstrained(name, x))
            .collect()
    }

    fn from_unconstrained(&self, u: &[f64]) -> Result<(LgtParams, f64)> {
        if u.len() != self.dim() || u.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("bad unconstrained vector".into()));
        }
        let mut log_jac = 0.0;
        let mut x = [0.0; 10];
        for (i, ((_, b), &ui)) in self.boxes().iter().zip(u).enumerate() {
            let (xi, lj) = b.from_unconstrained(ui);
            x[i] = xi;
            log_jac += lj;
        }
        let (tau, xi, b1) = if self.homoscedastic {
            (0.0, 0.0, x[7])
        } else {
            (x[7], x[8], x[9])
        };
        Ok((
            LgtParams {
                nu: x[0],
                gamma: x[1],
                rho: x[2],
                lambda: x[3],
                alpha: x[4],
                beta: x[5],
                sigma: x[6],
                tau,
                xi,
                b1,
                l1: self.y[0],
            },
            log_jac,
        ))
    }

    fn in_bounds(&self, p: &LgtParams) -> bool {
        let scalars_ok = self
            .boxes()
            .iter()
            .zip(self.free_values(p))
            .all(|((_, b), x)| x.is_finite() && b.contains(x));
        let pinned_ok = !self.homoscedastic || (p.tau == 0.0 && p.xi == 0.0);
        scalars_ok && pinned_ok && p.l1.is_finite()
    }

    fn log_prior(&self, p: &LgtParams) -> f64 {
        if !self.in_bounds(p) {
            return f64::NEG_INFINITY;
        }
        let pr = &self.priors;
        let b = &pr.bounds;
        let mut lp = Priors::log_uniform(b.nu, p.nu)
            + Priors::log_uniform(b.rho, p.rho)
            + pr.log_gamma(p.gamma)
            + pr.log_lambda(p.lambda)
            + pr.log_alpha(p.alpha)
            + pr.log_beta(p.beta)
            + pr.log_sigma(p.sigma)
            + pr.log_b1(p.b1);
        if !self.homoscedastic {
            lp += Priors::log_uniform(b.tau, p.tau) + pr.log_xi(p.xi);
        }
        lp
    }

    fn log_likelihood(&self, p: &LgtParams) -> f64 {
        Self::loglik_for(&self.y, p)
    }

    fn initial_params(&self) -> LgtParams {
        let b = &self.priors.bounds;
        let mean_y = self.y.iter().sum::<f64>() / self.y.len() as f64;
        let tau = if self.homoscedastic { 0.0 } else { interior(b.tau, 0.2) };
        let xi = if self.homoscedastic { 0.0 } else { 0.5 * self.priors.xi_scale };
        let sigma = interior(
            b.sigma,
            0.5 * self.priors.sigma_scale / mean_y.max(1.0).powf(tau),
        );
        LgtParams {
            nu: interior(b.nu, 6.0),
            gamma: interior(b.gamma, 0.0),
            rho: interior(b.rho, 0.3),
            lambda: interior(b.lambda, 0.5),
            alpha: interior(b.alpha, 0.5),
            beta: interior(b.beta, 0.2),
            sigma,
            tau,
            xi,
            b1: interior(b.b1, initial_trend(&self.y)),
            l1: self.y[0],
        }
    }

    fn sample_prior(&self, rng: &mut RngState) -> Result<LgtParams> {
        let pr = &self.priors;
        let b = &pr.bounds;
        let homo = self.homoscedastic;
        Ok(LgtParams {
            nu: uniform_in(rng, b.nu),
            gamma: cauchy_in(rng, pr.gamma_loc, pr.gamma_scale, b.gamma),
            rho: uniform_in(rng, b.rho),
            lambda: cauchy_in(rng, pr.lambda_loc, pr.lambda_scale, b.lambda),
            alpha: sample_beta(rng, pr.alpha.0, pr.alpha.1)?,
            beta: sample_beta(rng, pr.beta.0, pr.beta.1)?,
            sigma: cauchy_in(rng, 0.0, pr.sigma_scale, positive_part(b.sigma)),
            tau: if homo { 0.0 } else { uniform_in(rng, b.tau) },
            xi: if homo { 0.0 } else { cauchy_in(rng, 0.0, pr.xi_scale, Bound::POSITIVE) },
            b1: cauchy_in(rng, 0.0, pr.b1_scale, b.b1),
            l1: self.y[0],
        })
    }

    fn final_state(&self, p: &LgtParams) -> Result<LgtState> {
        let pass = self.forward(p)?;
        Ok(LgtState {
            level: *pass.levels.last().expect("non-empty"),
            trend: *pass.trends.last().expect("non-empty"),
        })
    }

    fn simulate_path(
        &self,
        p: &LgtParams,
        state: &LgtState,
        rng: &mut RngState,
        out: &mut [f64],
    ) -> Result<()> {
        let mut level = state.level.max(LEVEL_FLOOR);
        let mut trend = state.trend;
        for slot in out.iter_mut() {
            let yhat = one_step(level, trend, p);
            let scale = error_scale(yhat, p.sigma, p.tau, p.xi);
            let draw = (yhat + scale * sample_student_t(rng, p.nu)?).max(LEVEL_FLOOR);
            let next = (p.alpha * draw + (1.0 - p.alpha) * level).max(LEVEL_FLOOR);
            trend = p.beta * (next - level) + (1.0 - p.beta) * trend;
            level = next;
            if !draw.is_finite() {
                return Err(Error::Sampler("simulated path diverged".into()));
            }
            *slot = draw;
        }
        Ok(())
    }
}

/// Clamp a preferred starting value into the open interior of a box.
pub(crate) fn interior(b: Bound, preferred: f64) -> f64 {
    let (lo, hi) = (b.lo, b.hi);
    let margin = if lo.is_finite() && hi.is_finite() {
        1e-3 * (hi - lo)
    } else {
        1e-6 * (1.0 + preferred.abs())
    };
    if preferred <= lo {
        if hi.is_finite() {
            (lo + margin).min(0.5 * (lo + hi))
        } else {
            lo + margin.max(1e-6)
        }
    } else if preferred >= hi {
        if lo.is_finite() {
            (hi - margin).max(0.5 * (lo + hi))
        } else {
            hi - margin.max(1e-6)
        }
    } else {
        preferred
    }
}

pub(crate) fn uniform_in(rng: &mut RngState, b: Bound) -> f64 {
    b.lo + (b.hi - b.lo) * rng.random::<f64>()
}

/// Exact draw from a Cauchy restricted to a box, by inverse CDF.
pub(crate) fn cauchy_in(rng: &mut RngState, loc: f64, scale: f64, b: Bound) -> f64 {
    let cdf = |x: f64| 0.5 + ((x - loc) / scale).atan() / std::f64::consts::PI;
    let (lo, hi) = (cdf(b.lo), cdf(b.hi));
    let u = lo + (hi - lo) * rng.random_range(1e-12..1.0 - 1e-12);
    let x = loc + scale * (std::f64::consts::PI * (u - 0.5)).tan();
    interior(b, x)
}

fn positive_part(b: Bound) -> Bound {
    Bound::new(b.lo.max(0.0), b.hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ets::{aadn_filter, EtsParams};
    use crate::rand_dist::student_t_logpdf;
    use proptest::prelude::*;

    fn params() -> LgtParams {
        LgtParams {
            nu: 5.0,
            gamma: 0.0,
            rho: 0.5,
            lambda: 0.0,
            alpha: 0.4,
            beta: 0.3,
            sigma: 0.5,
            tau: 0.3,
            xi: 0.1,
            b1: 0.0,
            l1: 10.0,
        }
    }

    #[test]
    fn one_step_examples() {
        let mut p = params();
        assert_eq!(lgt_one_step(100.0, 7.0, &p).unwrap(), 100.0);
        p.gamma = 1.0;
        p.rho = 0.5;
        assert_eq!(lgt_one_step(100.0, 7.0, &p).unwrap(), 110.0);
        p.gamma = 0.5;
        p.rho = 1.0;
        p.lambda = 1.0;
        assert_eq!(lgt_one_step(100.0, 2.0, &p).unwrap(), 152.0);
        assert!(lgt_one_step(0.0005, 0.0, &p).is_err());
    }

    #[test]
    fn error_scale_examples() {
        let mut p = params();
        p.sigma = 0.0;
        for yhat in [0.01, 5.0, 1e6] {
            assert_eq!(lgt_error_scale(yhat, &p).unwrap(), p.xi);
        }
        p.tau = 0.0;
        p.sigma = 0.3;
        p.xi = 0.1;
        for yhat in [0.01, 5.0, 1e6] {
            assert!((lgt_error_scale(yhat, &p).unwrap() - 0.4).abs() < 1e-15);
        }
        p.tau = 1.0;
        p.sigma = 0.1;
        p.xi = 1.0;
        assert!((lgt_error_scale(100.0, &p).unwrap() - 11.0).abs() < 1e-12);
    }

    #[test]
    fn generalized_trend_limits() {
        assert_eq!(generalized_trend_one_step(50.0, 3.0, 0.0).unwrap(), 53.0);
        let delta = 0.04;
        let v = generalized_trend_one_step(50.0, delta, 1.0).unwrap();
        assert!((v - 50.0 * (1.0 + delta)).abs() < 1e-12);
        assert_eq!(generalized_trend_one_step(50.0, 0.0, 0.7).unwrap(), 50.0);
    }

    #[test]
    fn forward_with_full_smoothing_tracks_data() {
        let y = [10.0, 12.0, 9.0, 15.0, 14.0];
        let mut p = params();
        p.alpha = 1.0;
        p.l1 = y[0];
        let pass = lgt_forward(&y, &p).unwrap();
        assert_eq!(pass.levels, y.to_vec());
        assert_eq!(pass.yhat, y[..4].to_vec());
    }

    #[test]
    fn forward_constant_series_closed_form() {
        let y = [10.0; 8];
        let p = params();
        let pass = lgt_forward(&y, &p).unwrap();
        assert!(pass.yhat.iter().all(|&v| v == 10.0));
        let scale = p.sigma * 10f64.powf(p.tau) + p.xi;
        let expected = 7.0 * student_t_logpdf(0.0, p.nu, 0.0, scale).unwrap();
        assert!((pass.loglik - expected).abs() < 1e-10);
    }

    #[test]
    fn zero_trend_smoothing_freezes_trend() {
        let y = [10.0, 12.0, 9.0, 15.0, 14.0, 20.0];
        let mut p = params();
        p.beta = 0.0;
        p.b1 = 1.5;
        let pass = lgt_forward(&y, &p).unwrap();
        assert!(pass.trends.iter().all(|&b| b == 1.5));
    }

    #[test]
    fn forward_rejects_bad_input() {
        assert!(lgt_forward(&[1.0], &params()).is_err());
        assert!(lgt_forward(&[1.0, -1.0, 2.0], &params()).is_err());
    }

    #[test]
    fn likelihood_integrates_to_one() {
        // Each one-step density is a proper Student-t in y_{t+1}.
        let p = LgtParams { tau: 0.6, ..params() };
        for &(level, trend) in &[(5.0, 0.3), (120.0, -2.0), (0.5, 0.0)] {
            let yhat = lgt_one_step(level, trend, &p).unwrap();
            let scale = lgt_error_scale(yhat, &p).unwrap();
            let f = |th: f64| {
                let c = th.cos();
                let y = yhat + scale * th.tan();
                student_t_logpdf(y, p.nu, yhat, scale).unwrap().exp() * scale / (c * c)
            };
            let n = 200_000;
            let lim = std::f64::consts::FRAC_PI_2;
            let h = 2.0 * lim / n as f64;
            let total: f64 = (0..n).map(|i| f(-lim + (i as f64 + 0.5) * h) * h).sum();
            assert!((total - 1.0).abs() < 1e-6, "{total}");
        }
    }

    #[test]
    fn drift_behaviour_at_zero_power() {
        let p = LgtParams { gamma: 2.5, rho: 0.0, lambda: 0.4, ..params() };
        let reference = lgt_one_step(10.0, 1.0, &p).unwrap() - 10.0;
        for level in [0.5, 3.0, 250.0, 1e5] {
            let v = lgt_one_step(level, 1.0, &p).unwrap() - level;
            assert!((v - reference).abs() < 1e-9);
        }
    }

    #[test]
    fn reduces_to_holt_at_full_level_smoothing() {
        // With alpha = 1 both level recursions collapse to l_t = y_t and the
        // one-step predictions coincide.
        let y = [20.0, 22.5, 21.0, 26.0, 30.5, 29.0, 35.0];
        let lgt = LgtParams {
            nu: 1e9,
            gamma: 0.0,
            rho: 0.5,
            lambda: 1.0,
            alpha: 1.0,
            beta: 0.35,
            sigma: 0.0,
            tau: 0.0,
            xi: 1e-9,
            b1: 1.2,
            l1: y[0],
        };
        let ets = EtsParams::aadn(1.0, 0.35, 1.0, y[0], 1.2, 1.0);
        let a = lgt_forward(&y, &lgt).unwrap();
        let b = aadn_filter(&y, &ets).unwrap();
        for (u, v) in a.yhat.iter().zip(&b.predictions) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn model_round_trip_and_prior() {
        let y: Vec<f64> = (0..20).map(|t| 50.0 + 3.0 * t as f64).collect();
        let model = LgtModel::new(&y, &PriorConfig::default()).unwrap();
        let p = model.initial_params();
        assert!(model.in_bounds(&p));
        let u = model.to_unconstrained(&p).unwrap();
        let (back, _) = model.from_unconstrained(&u).unwrap();
        for (a, b) in model.flatten(&p).iter().zip(model.flatten(&back)) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
        assert!(model.log_target(&u).is_finite());

        // Uniform tau prior: moving tau changes only the likelihood.
        let lp = model.log_prior(&p);
        let moved = LgtParams { tau: 0.8, ..p.clone() };
        assert_eq!(model.log_prior(&moved), lp);
        let outside = LgtParams { alpha: 1.2, ..p };
        assert_eq!(model.log_prior(&outside), f64::NEG_INFINITY);
    }

    #[test]
    fn prior_draws_stay_in_bounds() {
        let y: Vec<f64> = (0..20).map(|t| 50.0 + 3.0 * t as f64).collect();
        let model = LgtModel::new(&y, &PriorConfig::default()).unwrap();
        let homo = LgtModel::homoscedastic(&y, &PriorConfig::default()).unwrap();
        let mut rng = RngState::from_seed(11);
        for _ in 0..2000 {
            let p = model.sample_prior(&mut rng).unwrap();
            assert!(model.in_bounds(&p), "{p:?}");
            let q = homo.sample_prior(&mut rng).unwrap();
            assert!(homo.in_bounds(&q));
            assert_eq!((q.tau, q.xi), (0.0, 0.0));
        }
    }

    proptest! {
        #[test]
        fn unconstrained_round_trip(u in prop::collection::vec(-8.0f64..8.0, 10)) {
            let y: Vec<f64> = (0..15).map(|t| 10.0 + t as f64).collect();
            let model = LgtModel::new(&y, &PriorConfig::default()).unwrap();
            let (p, _) = model.from_unconstrained(&u).unwrap();
            prop_assert!(model.in_bounds(&p));
            if let Ok(back) = model.to_unconstrained(&p) {
                let (again, _) = model.from_unconstrained(&back).unwrap();
                for (a, b) in model.flatten(&p).iter().zip(model.flatten(&again)) {
                    prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
                }
            }
        }
    }
}
