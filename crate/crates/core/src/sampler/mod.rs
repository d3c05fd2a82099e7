//! MCMC backends.
//!
//! [`fit_mwg`] is a componentwise adaptive random-walk Metropolis sampler
//! on the unconstrained parameterization of any [`Model`]. [`fit_gibbs_lgt`]
//! is a Gibbs sampler specialized to the homoscedastic LGT model, built on
//! the normal scale-mixture form of the Student-t errors.

mod diagnostics;
mod gibbs;
mod grid;
mod mwg;

pub use diagnostics::{diagnostics, effective_sample_size, ParamSummary, MIN_DRAWS_PER_CHAIN};
pub use gibbs::{fit_gibbs_lgt, geweke_lgt, sigma2_conditional, GewekeStat, GibbsState};
pub use grid::{grid_sample, grid_sample_index};
pub use mwg::{fit_mwg, run_rwm, RwmRun};

use crate::error::{Error, Result};
use crate::model::Model;

/// Run lengths, adaptation target and the grids used by the Gibbs backend.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub n_chains: usize,
    pub n_iter: usize,
    pub n_burn: usize,
    pub thin: usize,
    /// Per-coordinate acceptance rate targeted during burn-in.
    pub target_accept: f64,
    pub nu_grid: Vec<f64>,
    pub rho_grid: Vec<f64>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            n_chains: 4,
            n_iter: 5000,
            n_burn: 2500,
            thin: 5,
            target_accept: 0.44,
            nu_grid: vec![2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 14.0, 20.0],
            rho_grid: (0..31).map(|i| -0.5 + 0.05 * i as f64).collect(),
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n_chains == 0 {
            return bad("need at least one chain".into());
        }
        if self.thin == 0 {
            return bad("thin must be positive".into());
        }
        if self.n_burn >= self.n_iter {
            return bad(format!(
                "burn-in ({}) must be shorter than the run ({})",
                self.n_burn, self.n_iter
            ));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return bad(format!("target acceptance {} outside (0, 1)", self.target_accept));
        }
        check_grid("nu", &self.nu_grid, 2.0, 20.0)?;
        check_grid("rho", &self.rho_grid, -0.5, 1.0)?;
        Ok(())
    }

    /// Draws kept per chain: `floor((n_iter - n_burn) / thin)`.
    pub fn draws_per_chain(&self) -> usize {
        (self.n_iter - self.n_burn) / self.thin
    }

    /// Whether iteration `k` (zero-based) is recorded.
    pub(crate) fn keeps(&self, k: usize) -> bool {
        k >= self.n_burn && (k - self.n_burn) % self.thin == self.thin - 1
    }
}

fn check_grid(name: &str, grid: &[f64], lo: f64, hi: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} grid is empty")));
    }
    if grid.iter().any(|&g| !(g >= lo - 1e-12 && g <= hi + 1e-12)) {
        return Err(Error::InvalidArgument(format!("{name} grid must lie within [{lo}, {hi}]")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!("{name} grid must be strictly ascending")));
    }
    Ok(())
}

/// Posterior draws in chain-major order with their provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws<P> {
    pub draws: Vec<P>,
    /// Chain index of each draw.
    pub chain: Vec<usize>,
    /// Zero-based iteration of each draw within its chain.
    pub iteration: Vec<usize>,
    pub n_chains: usize,
    /// Mean post burn-in acceptance rate per chain (Metropolis steps only).
    pub acceptance: Vec<f64>,
}

impl<P> PosteriorDraws<P> {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Draws loaded from a file, with no chain structure beyond the recorded
    /// indices.
    pub fn from_parts(draws: Vec<P>, chain: Vec<usize>, iteration: Vec<usize>) -> Result<Self> {
        if draws.len() != chain.len() || draws.len() != iteration.len() {
            return Err(Error::InvalidArgument("draw provenance has the wrong length".into()));
        }
        let n_chains = chain.iter().max().map_or(0, |c| c + 1);
        Ok(Self {
            draws,
            chain,
            iteration,
            n_chains,
            acceptance: Vec::new(),
        })
    }

    pub(crate) fn assemble(chains: Vec<ChainOutput<P>>) -> Self {
        let n_chains = chains.len();
        let mut out = Self {
            draws: Vec::new(),
            chain: Vec::new(),
            iteration: Vec::new(),
            n_chains,
            acceptance: Vec::with_capacity(n_chains),
        };
        for (c, run) in chains.into_iter().enumerate() {
            out.chain.extend(std::iter::repeat_n(c, run.draws.len()));
            out.iteration.extend(run.iterations);
            out.draws.extend(run.draws);
            out.acceptance.push(run.acceptance);
        }
        out
    }

    /// Per-parameter summaries in the model's flat parameter order.
    pub fn summarize<M: Model<Params = P>>(&self, model: &M) -> Result<Vec<ParamSummary>> {
        let mut chains: Vec<Vec<Vec<f64>>> = vec![Vec::new(); self.n_chains];
        for (d, &c) in self.draws.iter().zip(&self.chain) {
            chains[c].push(model.flatten(d));
        }
        diagnostics(&model.param_names(), &chains)
    }
}

pub(crate) struct ChainOutput<P> {
    pub draws: Vec<P>,
    pub iterations: Vec<usize>,
    pub acceptance: f64,
}

/// Robbins-Monro gain at iteration `k` (zero-based).
pub(crate) fn adaptation_gain(k: usize) -> f64 {
    1.0 / ((k + 1) as f64).powf(0.6)
}

/// Post burn-in acceptance below this fails the run.
pub(crate) const MIN_ACCEPTANCE: f64 = 0.01;

/// Attempts at a finite starting point before giving up.
pub(crate) const MAX_INIT_ATTEMPTS: usize = 100;
