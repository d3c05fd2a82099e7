use rand::{Rng, RngCore};
use rayon::prelude::*;

use super::{
    adaptation_gain, ChainOutput, PosteriorDraws, SamplerConfig, MAX_INIT_ATTEMPTS, MIN_ACCEPTANCE,
};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::rand_dist::{sample_standard_normal, RngState};

/// Fit `model` with componentwise adaptive random-walk Metropolis.
///
/// Each chain works on the unconstrained vector, one coordinate at a time,
/// with the Jacobian of the inverse transform in the target. Log proposal
/// scales follow a Robbins-Monro recursion towards
/// `config.target_accept` during burn-in and stay fixed afterwards. Chain
/// `c` starts from the model's initial point (jittered for `c > 0`) and
/// runs on its own stream split from `rng`; chains run in parallel.
pub fn fit_mwg<M: Model>(
    model: &M,
    config: &SamplerConfig,
    rng: &mut RngState,
) -> Result<PosteriorDraws<M::Params>> {
    config.validate()?;
    let base = rng.next_u64();
    let chains = (0..config.n_chains)
        .into_par_iter()
        .map(|c| {
            let mut stream = RngState::for_stream(base, c as u64);
            let start = starting_point(model, c, &mut stream)?;
            let run = run_rwm(|u| model.log_target(u), start, config, &mut stream);
            if run.acceptance < MIN_ACCEPTANCE {
                return Err(Error::Sampler(format!(
                    "chain {c} accepted {:.2}% of proposals after burn-in",
                    100.0 * run.acceptance
                )));
            }
            let draws = run
                .draws
                .iter()
                .map(|u| model.from_unconstrained(u).map(|(p, _)| p))
                .collect::<Result<Vec<_>>>()?;
            Ok(ChainOutput {
                draws,
                iterations: run.iterations,
                acceptance: run.acceptance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PosteriorDraws::assemble(chains))
}

fn starting_point<M: Model>(model: &M, chain: usize, rng: &mut RngState) -> Result<Vec<f64>> {
    let mut u = model.to_unconstrained(&model.initial_params())?;
    if chain > 0 {
        for x in u.iter_mut() {
            *x += 0.2 * (1.0 + 0.1 * x.abs()) * sample_standard_normal(rng);
        }
    }
    if model.log_target(&u).is_finite() {
        return Ok(u);
    }
    for _ in 0..MAX_INIT_ATTEMPTS {
        if let Ok(u) = model.sample_prior(rng).and_then(|p| model.to_unconstrained(&p)) {
            if model.log_target(&u).is_finite() {
                return Ok(u);
            }
        }
    }
    Err(Error::Sampler(format!(
        "no finite starting point after {MAX_INIT_ATTEMPTS} prior draws"
    )))
}

pub struct RwmRun {
    pub draws: Vec<Vec<f64>>,
    pub iterations: Vec<usize>,
    pub acceptance: f64,
}

/// Componentwise adaptive random-walk Metropolis on an arbitrary log
/// density over R^d, with the run lengths and adaptation of `config`.
pub fn run_rwm<F: Fn(&[f64]) -> f64>(
    log_target: F,
    mut u: Vec<f64>,
    config: &SamplerConfig,
    rng: &mut RngState,
) -> RwmRun {
    let d = u.len();
    let mut log_scale: Vec<f64> = u.iter().map(|x| (0.25 * (1.0 + 0.1 * x.abs())).ln()).collect();
    let mut current = log_target(&u);
    let mut accepted = 0usize;
    let mut proposed = 0usize;
    let mut draws = Vec::with_capacity(config.draws_per_chain());
    let mut iterations = Vec::with_capacity(config.draws_per_chain());
    for k in 0..config.n_iter {
        let burning = k < config.n_burn;
        for i in 0..d {
            let old = u[i];
            u[i] = old + log_scale[i].exp() * sample_standard_normal(rng);
            let candidate = log_target(&u);
            let log_ratio = candidate - current;
            let accept = log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio;
            if accept {
                current = candidate;
            } else {
                u[i] = old;
            }
            if burning {
                let rate = if log_ratio.is_nan() { 0.0 } else { log_ratio.min(0.0).exp() };
                log_scale[i] += adaptation_gain(k) * (rate - config.target_accept);
            } else {
                proposed += 1;
                accepted += usize::from(accept);
            }
        }
        if config.keeps(k) {
            draws.push(u.clone());
            iterations.push(k);
        }
    }
    RwmRun {
        draws,
        iterations,
        acceptance: if proposed == 0 { 0.0 } else { accepted as f64 / proposed as f64 },
    }
}
