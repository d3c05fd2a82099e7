use rand::{Rng, RngCore};
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use super::grid::grid_sample_index;
use super::{
    adaptation_gain, ChainOutput, PosteriorDraws, SamplerConfig, MAX_INIT_ATTEMPTS, MIN_ACCEPTANCE,
};
use crate::error::{Error, Result};
use super::diagnostics::effective_sample_size;
use crate::model::{Bound, LgtModel, LgtParams, Model, PriorConfig, Priors, LEVEL_FLOOR};
use crate::rand_dist::{
    beta_logpdf, sample_beta, sample_gamma, sample_inverse_gamma, sample_inverse_gamma_truncated, sample_standard_normal,
    sample_truncated_normal, RngState,
};

/// Full state of one Gibbs chain on the homoscedastic LGT model.
///
/// The Student-t errors are written as `N(yhat, sigma^2 omega_t^2)` with
/// `omega_t^2 ~ IG(nu/2, nu/2)`. The half-Cauchy prior on `sigma` is the
/// mixture `sigma^2 | a ~ IG(1/2, 1/a)`, `a ~ IG(1/2, 1/A^2)`, and each
/// Cauchy coefficient prior is `N(loc, kappa * scale^2)` with
/// `kappa ~ IG(1/2, 1/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsState {
    pub params: LgtParams,
    /// `omega_t^2` for `y_2..y_n`.
    pub omega2: Vec<f64>,
    pub sigma_aux: f64,
    pub gamma_aux: f64,
    pub lambda_aux: f64,
}

/// Shape and rate of the inverse-gamma conditional of `sigma^2` given
/// residuals `r_t`, mixing weights `omega_t^2`, and prior contributions
/// `(prior_shape, prior_rate)`: `IG(N/2 + prior_shape, sum(r^2/omega^2)/2 + prior_rate)`.
///
/// The half-Cauchy mixture contributes `(1/2, 1/a)`; `(0, 0)` is the
/// scale-invariant improper prior.
pub fn sigma2_conditional(resid: &[f64], omega2: &[f64], prior_shape: f64, prior_rate: f64) -> (f64, f64) {
    let ss: f64 = resid.iter().zip(omega2).map(|(r, w)| r * r / w).sum();
    (0.5 * resid.len() as f64 + prior_shape, 0.5 * ss + prior_rate)
}

/// Fit the homoscedastic LGT model with the six-step Gibbs sweep.
///
/// Per sweep: (1) `sigma^2` and its mixing latent; (2) every `omega_t^2`;
/// (3) `nu` on its grid; (4) `gamma` and `lambda` from truncated normal
/// regression conditionals; (5) `alpha`, `beta` and `b1` by adaptive
/// Metropolis steps with `omega` integrated out; (6) `rho` on its grid, also
/// with `omega` integrated out. Steps 5 and 6 leave `omega` out of date, so
/// it is redrawn from its full conditional before the sweep ends.
///
/// `nu` and `rho` get discrete uniform priors over the configured grids
/// (restricted to the model's boxes).
pub fn fit_gibbs_lgt(
    model: &LgtModel,
    config: &SamplerConfig,
    rng: &mut RngState,
) -> Result<PosteriorDraws<LgtParams>> {
    config.validate()?;
    if !model.is_homoscedastic() {
        return Err(Error::InvalidArgument(
            "the Gibbs backend only fits the homoscedastic LGT model".into(),
        ));
    }
    let ctx = Context::new(model.data(), model.priors(), config)?;
    let base = rng.next_u64();
    let chains = (0..config.n_chains)
        .into_par_iter()
        .map(|c| {
            let mut stream = RngState::for_stream(base, c as u64);
            let mut state = ctx.initial_state(model, c, &mut stream)?;
            let mut mh = MhScales::new(&state.params, &ctx);
            let mut draws = Vec::with_capacity(config.draws_per_chain());
            let mut iterations = Vec::with_capacity(config.draws_per_chain());
            for k in 0..config.n_iter {
                let adapt = (k < config.n_burn).then_some(k);
                ctx.sweep(&mut state, &mut mh, adapt, &mut stream)?;
                if config.keeps(k) {
                    draws.push(state.params.clone());
                    iterations.push(k);
                }
            }
            let acceptance = mh.acceptance();
            if acceptance < MIN_ACCEPTANCE {
                return Err(Error::Sampler(format!(
                    "chain {c} accepted {:.2}% of smoothing proposals after burn-in",
                    100.0 * acceptance
                )));
            }
            Ok(ChainOutput { draws, iterations, acceptance })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PosteriorDraws::assemble(chains))
}

/// Data, priors and grids shared by every sweep.
pub(crate) struct Context<'a> {
    y: &'a [f64],
    priors: &'a Priors,
    nu_grid: Vec<f64>,
    rho_grid: Vec<f64>,
    target_accept: f64,
}

/// Log proposal scales of the Metropolis block (logit alpha, logit beta,
/// unconstrained b1) and post burn-in acceptance counts.
pub(crate) struct MhScales {
    log_scale: [f64; 3],
    accepted: usize,
    proposed: usize,
}

impl MhScales {
    pub(crate) fn new(params: &LgtParams, ctx: &Context) -> Self {
        let b1_scale = 0.25 * (ctx.priors.b1_scale.min(1.0 + params.b1.abs()));
        Self {
            log_scale: [0.5f64.ln(), 0.5f64.ln(), b1_scale.ln()],
            accepted: 0,
            proposed: 0,
        }
    }

    fn acceptance(&self) -> f64 {
        if self.proposed == 0 {
            1.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

impl<'a> Context<'a> {
    pub(crate) fn new(y: &'a [f64], priors: &'a Priors, config: &SamplerConfig) -> Result<Self> {
        let b = &priors.bounds;
        let within = |grid: &[f64], bound: Bound, name: &str| {
            let kept: Vec<f64> = grid.iter().copied().filter(|&g| bound.contains(g)).collect();
            if kept.is_empty() {
                Err(Error::InvalidArgument(format!("no {name} grid point inside its box")))
            } else {
                Ok(kept)
            }
        };
        if b.sigma.lo > 0.0 {
            return Err(Error::InvalidArgument(
                "the Gibbs backend needs a sigma box starting at zero".into(),
            ));
        }
        Ok(Self {
            y,
            priors,
            nu_grid: within(&config.nu_grid, b.nu, "nu")?,
            rho_grid: within(&config.rho_grid, b.rho, "rho")?,
            target_accept: config.target_accept,
        })
    }

    fn n_resid(&self) -> usize {
        self.y.len() - 1
    }

    fn initial_state(&self, model: &LgtModel, chain: usize, rng: &mut RngState) -> Result<GibbsState> {
        let snap = |grid: &[f64], x: f64| {
            *grid
                .iter()
                .min_by(|a, b| (*a - x).abs().total_cmp(&(*b - x).abs()))
                .expect("grid is non-empty")
        };
        let mut params = model.initial_params();
        if chain > 0 {
            params.alpha = (params.alpha + 0.2 * sample_standard_normal(rng)).clamp(0.05, 0.95);
            params.beta = (params.beta + 0.1 * sample_standard_normal(rng)).clamp(0.02, 0.9);
        }
        let mut attempts = 0;
        loop {
            params.nu = snap(&self.nu_grid, params.nu);
            params.rho = snap(&self.rho_grid, params.rho);
            if model.log_prior(&params).is_finite() && model.log_likelihood(&params).is_finite() {
                break;
            }
            if attempts == MAX_INIT_ATTEMPTS {
                return Err(Error::Sampler(format!(
                    "no finite starting point after {MAX_INIT_ATTEMPTS} prior draws"
                )));
            }
            attempts += 1;
            params = model.sample_prior(rng)?;
        }
        let n = self.n_resid();
        let mut state = GibbsState {
            params,
            omega2: vec![1.0; n],
            sigma_aux: self.priors.sigma_scale * self.priors.sigma_scale,
            gamma_aux: 1.0,
            lambda_aux: 1.0,
        };
        self.draw_omega(&mut state, rng)?;
        Ok(state)
    }

    /// Levels `l_1..l_{n-1}` and trends `b_1..b_{n-1}` feeding the
    /// predictions of `y_2..y_n`. They depend only on the smoothing
    /// parameters and `b1`.
    fn states(&self, p: &LgtParams) -> (Vec<f64>, Vec<f64>) {
        let n = self.n_resid();
        let mut levels = Vec::with_capacity(n);
        let mut trends = Vec::with_capacity(n);
        let mut level = p.l1.max(LEVEL_FLOOR);
        let mut trend = p.b1;
        for &obs in &self.y[1..] {
            levels.push(level);
            trends.push(trend);
            let next = (p.alpha * obs + (1.0 - p.alpha) * level).max(LEVEL_FLOOR);
            trend = p.beta * (next - level) + (1.0 - p.beta) * trend;
            level = next;
        }
        (levels, trends)
    }

    fn residuals(&self, p: &LgtParams) -> Vec<f64> {
        let (levels, trends) = self.states(p);
        self.y[1..]
            .iter()
            .zip(levels.iter().zip(&trends))
            .map(|(obs, (l, b))| obs - (l + p.gamma * l.powf(p.rho) + p.lambda * b))
            .collect()
    }

    /// Student-t log-likelihood with `omega` integrated out.
    fn marginal_loglik(&self, p: &LgtParams) -> f64 {
        LgtModel::loglik_for(self.y, p)
    }

    fn draw_omega(&self, state: &mut GibbsState, rng: &mut RngState) -> Result<()> {
        let p = &state.params;
        let sigma2 = p.sigma * p.sigma;
        let shape = 0.5 * (p.nu + 1.0);
        for (w, r) in state.omega2.iter_mut().zip(self.residuals(p)) {
            *w = sample_inverse_gamma(rng, shape, 0.5 * (p.nu + r * r / sigma2))?;
        }
        Ok(())
    }

    /// One full sweep; `adapt` carries the iteration index during burn-in.
    pub(crate) fn sweep(
        &self,
        state: &mut GibbsState,
        mh: &mut MhScales,
        adapt: Option<usize>,
        rng: &mut RngState,
    ) -> Result<()> {
        let pr = self.priors;
        let bounds = &pr.bounds;

        // 1. sigma^2 and the half-Cauchy mixing latent.
        let resid = self.residuals(&state.params);
        let (shape, rate) = sigma2_conditional(&resid, &state.omega2, 0.5, 1.0 / state.sigma_aux);
        let upper = bounds.sigma.hi * bounds.sigma.hi;
        let sigma2 = sample_inverse_gamma_truncated(rng, shape, rate, upper)?;
        state.params.sigma = sigma2.sqrt();
        let a2 = pr.sigma_scale * pr.sigma_scale;
        state.sigma_aux = sample_inverse_gamma(rng, 1.0, 1.0 / sigma2 + 1.0 / a2)?;

        // 2. mixing weights.
        self.draw_omega(state, rng)?;

        // 3. nu | omega on its grid.
        let n = state.omega2.len() as f64;
        let sum_log: f64 = state.omega2.iter().map(|w| w.ln()).sum();
        let sum_inv: f64 = state.omega2.iter().map(|w| 1.0 / w).sum();
        let weights: Vec<f64> = self
            .nu_grid
            .iter()
            .map(|&nu| {
                let h = 0.5 * nu;
                n * (h * h.ln() - ln_gamma(h)) - (h + 1.0) * sum_log - h * sum_inv
            })
            .collect();
        state.params.nu = self.nu_grid[grid_sample_index(rng, &weights)?];

        // 4. gamma and lambda: with levels and trends fixed, the predictor
        // is linear in both coefficients.
        let (levels, trends) = self.states(&state.params);
        let x_gamma: Vec<f64> = levels.iter().map(|l| l.powf(state.params.rho)).collect();
        let precision: Vec<f64> = state.omega2.iter().map(|w| 1.0 / (sigma2 * w)).collect();
        let regress = |target: &dyn Fn(usize) -> f64, x: &[f64], loc: f64, prior_var: f64, bound: Bound, rng: &mut RngState| {
            let mut prec = 1.0 / prior_var;
            let mut num = loc / prior_var;
            for t in 0..x.len() {
                prec += precision[t] * x[t] * x[t];
                num += precision[t] * x[t] * target(t);
            }
            sample_truncated_normal(rng, num / prec, prec.recip().sqrt(), bound.lo, bound.hi)
        };
        let lambda = state.params.lambda;
        state.params.gamma = regress(
            &|t| self.y[t + 1] - levels[t] - lambda * trends[t],
            &x_gamma,
            pr.gamma_loc,
            state.gamma_aux * pr.gamma_scale * pr.gamma_scale,
            bounds.gamma,
            rng,
        )?;
        let dev = (state.params.gamma - pr.gamma_loc) / pr.gamma_scale;
        state.gamma_aux = sample_inverse_gamma(rng, 1.0, 0.5 * (1.0 + dev * dev))?;
        let gamma = state.params.gamma;
        state.params.lambda = regress(
            &|t| self.y[t + 1] - levels[t] - gamma * x_gamma[t],
            &trends,
            pr.lambda_loc,
            state.lambda_aux * pr.lambda_scale * pr.lambda_scale,
            bounds.lambda,
            rng,
        )?;
        let dev = (state.params.lambda - pr.lambda_loc) / pr.lambda_scale;
        state.lambda_aux = sample_inverse_gamma(rng, 1.0, 0.5 * (1.0 + dev * dev))?;

        // 5. alpha, beta, b1 with omega integrated out.
        self.metropolis_block(state, mh, adapt, rng);

        // 6. rho with omega integrated out.
        let weights: Vec<f64> = self
            .rho_grid
            .iter()
            .map(|&rho| {
                let mut p = state.params.clone();
                p.rho = rho;
                self.marginal_loglik(&p)
            })
            .collect();
        state.params.rho = self.rho_grid[grid_sample_index(rng, &weights)?];

        // Refresh omega after the collapsed steps.
        self.draw_omega(state, rng)
    }

    fn block_target(&self, p: &LgtParams) -> f64 {
        let pr = self.priors;
        let prior = beta_logpdf(p.alpha, pr.alpha.0, pr.alpha.1)
            + beta_logpdf(p.beta, pr.beta.0, pr.beta.1)
            + pr.log_b1(p.b1);
        if !prior.is_finite() {
            return f64::NEG_INFINITY;
        }
        let ll = self.marginal_loglik(p);
        if ll.is_nan() {
            f64::NEG_INFINITY
        } else {
            prior + ll
        }
    }

    fn metropolis_block(&self, state: &mut GibbsState, mh: &mut MhScales, adapt: Option<usize>, rng: &mut RngState) {
        let boxes = [Bound::UNIT, Bound::UNIT, self.priors.bounds.b1];
        let mut current = self.block_target(&state.params);
        for (i, bound) in boxes.iter().enumerate() {
            let value = [state.params.alpha, state.params.beta, state.params.b1][i];
            let Ok(u) = bound.to_unconstrained("block", value) else {
                continue;
            };
            let (x_old, jac_old) = bound.from_unconstrained(u);
            let (x_new, jac_new) =
                bound.from_unconstrained(u + mh.log_scale[i].exp() * sample_standard_normal(rng));
            let mut candidate = state.params.clone();
            match i {
                0 => candidate.alpha = x_new,
                1 => candidate.beta = x_new,
                _ => candidate.b1 = x_new,
            }
            let proposed = self.block_target(&candidate);
            let log_ratio = proposed + jac_new - current - jac_old;
            let accept = log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio;
            if accept && bound.contains(x_new) {
                state.params = candidate;
                current = proposed;
            } else {
                debug_assert!(bound.contains(x_old));
            }
            match adapt {
                Some(k) => {
                    let rate = if log_ratio.is_nan() { 0.0 } else { log_ratio.min(0.0).exp() };
                    mh.log_scale[i] += adaptation_gain(k) * (rate - self.target_accept);
                }
                None => {
                    mh.proposed += 1;
                    mh.accepted += usize::from(accept);
                }
            }
        }
    }
}


/// One statistic compared by [`geweke_lgt`].
#[derive(Debug, Clone, PartialEq)]
pub struct GewekeStat {
    pub name: &'static str,
    /// Mean under independent prior draws.
    pub marginal: f64,
    /// Mean along the successive-conditional chain.
    pub successive: f64,
    /// Standard error of the difference, the chain part ESS-corrected.
    pub se: f64,
}

impl GewekeStat {
    pub fn z(&self) -> f64 {
        (self.marginal - self.successive) / self.se
    }

    pub fn passes(&self, k: f64) -> bool {
        self.z().abs() < k
    }
}

/// Geweke joint-distribution test of the Gibbs sweep on series of length
/// `n`: compares the prior means of gamma, sigma^2 and alpha with their
/// means along `sweeps` successive-conditional iterations (data redrawn
/// after every sweep). Boxes on gamma, sigma and b1 keep the simulated
/// series well behaved.
pub fn geweke_lgt(n: usize, sweeps: usize, seed: u64) -> Result<Vec<GewekeStat>> {
    let y1 = 10.0;
    let mut cfg = PriorConfig {
        gamma_scale: Some(0.5),
        sigma_scale: Some(1.0),
        b1_scale: Some(0.5),
        ..Default::default()
    };
    cfg.gamma = Bound::new(-0.5, 0.5);
    cfg.sigma = Bound::new(0.0, 2.0);
    cfg.b1 = Bound::new(-1.0, 1.0);
    let priors = cfg.resolve(&[y1, y1 + 1.0])?;
    let config = SamplerConfig::default();
    let burn = 2_000;
    let stats = |s: &GibbsState| [s.params.gamma, s.params.sigma * s.params.sigma, s.params.alpha];

    // Marginal-conditional simulator: independent prior draws.
    let mut rng = RngState::from_seed(seed);
    let mut marginal = Vec::with_capacity(sweeps);
    for _ in 0..sweeps {
        marginal.push(stats(&prior_state(&priors, &config, n, &mut rng)?));
    }

    // Successive-conditional simulator: alternate data and one sweep.
    let mut state = prior_state(&priors, &config, n, &mut rng)?;
    let mut y = simulate_data(y1, n, &state, &mut rng);
    let mut successive = Vec::with_capacity(sweeps);
    let mut mh = {
        let ctx = Context::new(&y, &priors, &config)?;
        MhScales::new(&state.params, &ctx)
    };
    for k in 0..burn + sweeps {
        let ctx = Context::new(&y, &priors, &config)?;
        let adapt = (k < burn).then_some(k);
        ctx.sweep(&mut state, &mut mh, adapt, &mut rng)?;
        y = simulate_data(y1, n, &state, &mut rng);
        if k >= burn {
            successive.push(stats(&state));
        }
    }

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let var = |v: &[f64]| {
        let m = mean(v);
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    };
    Ok(["gamma", "sigma^2", "alpha"]
        .iter()
        .enumerate()
        .map(|(j, &name)| {
            let a: Vec<f64> = marginal.iter().map(|s| s[j]).collect();
            let b: Vec<f64> = successive.iter().map(|s| s[j]).collect();
            let ess = effective_sample_size(std::slice::from_ref(&b));
            GewekeStat {
                name,
                marginal: mean(&a),
                successive: mean(&b),
                se: (var(&a) / a.len() as f64 + var(&b) / ess).sqrt(),
            }
        })
        .collect())
}

/// Simulate `y_2..y_n` from the scale-mixture form given all latents.
fn simulate_data(y1: f64, n: usize, s: &GibbsState, rng: &mut RngState) -> Vec<f64> {
    let p = &s.params;
    let mut y = vec![y1];
    let mut level = y1;
    let mut trend = p.b1;
    for t in 0..n - 1 {
        let yhat = level + p.gamma * level.powf(p.rho) + p.lambda * trend;
        let obs = yhat + p.sigma * s.omega2[t].sqrt() * sample_standard_normal(rng);
        let next = (p.alpha * obs + (1.0 - p.alpha) * level).max(LEVEL_FLOOR);
        trend = p.beta * (next - level) + (1.0 - p.beta) * trend;
        level = next;
        y.push(obs);
    }
    y
}

/// Draw every parameter and latent from the prior.
fn prior_state(priors: &Priors, config: &SamplerConfig, n: usize, rng: &mut RngState) -> Result<GibbsState> {
    let b = &priors.bounds;
    let trunc_cauchy = |rng: &mut RngState, loc: f64, scale: f64, bound: Bound| loop {
        let x = loc + scale * (std::f64::consts::PI * (rng.random::<f64>() - 0.5)).tan();
        if bound.contains(x) {
            return x;
        }
    };
    let sigma = trunc_cauchy(rng, 0.0, priors.sigma_scale, b.sigma).abs();
    let gamma = trunc_cauchy(rng, priors.gamma_loc, priors.gamma_scale, b.gamma);
    let lambda = trunc_cauchy(rng, priors.lambda_loc, priors.lambda_scale, b.lambda);
    let nu = config.nu_grid[rng.random_range(0..config.nu_grid.len())];
    let params = LgtParams {
        nu,
        gamma,
        rho: config.rho_grid[rng.random_range(0..config.rho_grid.len())],
        lambda,
        alpha: sample_beta(rng, priors.alpha.0, priors.alpha.1)?,
        beta: sample_beta(rng, priors.beta.0, priors.beta.1)?,
        sigma,
        tau: 0.0,
        xi: 0.0,
        b1: trunc_cauchy(rng, 0.0, priors.b1_scale, b.b1),
        l1: 10.0,
    };
    let a2 = priors.sigma_scale * priors.sigma_scale;
    let mix = |rng: &mut RngState, dev: f64| sample_inverse_gamma(rng, 1.0, 0.5 * (1.0 + dev * dev));
    Ok(GibbsState {
        omega2: (0..n - 1)
            .map(|_| sample_gamma(rng, 0.5 * nu, 0.5 * nu).map(|g| 1.0 / g))
            .collect::<Result<_>>()?,
        sigma_aux: sample_inverse_gamma(rng, 1.0, 1.0 / (sigma * sigma) + 1.0 / a2)?,
        gamma_aux: mix(rng, (gamma - priors.gamma_loc) / priors.gamma_scale)?,
        lambda_aux: mix(rng, (lambda - priors.lambda_loc) / priors.lambda_scale)?,
        params,
    })
}
