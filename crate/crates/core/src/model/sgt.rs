use super::lgt::{cauchy_in, error_scale, interior, uniform_in};
use super::prior::{PriorConfig, Priors};
use super::transform::{normalize_seasonal, seasonal_from_free, seasonal_to_free, Bound};
use super::{ForwardPass, Model, ModelKind, LEVEL_FLOOR};
use crate::error::{Error, Result};
use crate::rand_dist::{
    sample_beta, sample_cauchy, sample_student_t, student_t_log_norm, student_t_logpdf_unchecked,
    RngState,
};

/// Parameters of the seasonal global trend model.
#[derive(Debug, Clone, PartialEq)]
pub struct SgtParams {
    pub nu: f64,
    pub gamma: f64,
    pub rho: f64,
    pub alpha: f64,
    /// Seasonal smoothing.
    pub zeta: f64,
    pub sigma: f64,
    pub tau: f64,
    pub xi: f64,
    /// Initial seasonal factors `s_1..s_m`, mean one.
    pub s_init: Vec<f64>,
    /// Initial level, `y_1 / s_1`.
    pub l1: f64,
}

/// Level and the frozen factors `s_{n+1}..s_{n+m}` after the last observation.
#[derive(Debug, Clone, PartialEq)]
pub struct SgtState {
    pub level: f64,
    pub factors: Vec<f64>,
}

/// Filter a positive series through the SGT recursions.
///
/// Factors are kept in one array `s_1..s_{n+m}`: the first `m` come from
/// `s_init`, and observation `t` writes `s_{t+m}`. The prediction for
/// `y_{t+1}` uses `s_{t+1}`.
pub fn sgt_forward(y: &[f64], params: &SgtParams) -> Result<ForwardPass> {
    let m = params.s_init.len();
    if m < 2 {
        return Err(Error::InvalidArgument("SGT needs a seasonal period of at least 2".into()));
    }
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
        seasonal: Vec::with_capacity(y.len() + m),
        ..Default::default()
    };
    let mut factors = Vec::with_capacity(y.len() + m);
    pass.loglik = run(y, params, &mut factors, Some(&mut pass))?;
    pass.seasonal = factors;
    Ok(pass)
}

fn run(
    y: &[f64],
    p: &SgtParams,
    factors: &mut Vec<f64>,
    mut record: Option<&mut ForwardPass>,
) -> Result<f64> {
    let m = p.s_init.len();
    let log_norm = student_t_log_norm(p.nu);
    factors.clear();
    factors.extend_from_slice(&p.s_init);
    let mut level = p.l1.max(LEVEL_FLOOR);
    let mut loglik = 0.0;
    if let Some(r) = record.as_deref_mut() {
        r.levels.push(level);
    }
    let n = y.len();
    for t in 0..n {
        // s_{t+m} from y_t and l_t (0-based t here)
        let s_t = factors[t];
        factors.push(p.zeta * y[t] / level + (1.0 - p.zeta) * s_t);
        if t + 1 == n {
            break;
        }
        let s_next = factors[t + 1];
        let yhat = (level + p.gamma * level.powf(p.rho)) * s_next;
        let scale = error_scale(yhat, p.sigma, p.tau, p.xi);
        let obs = y[t + 1];
        loglik += if scale > 0.0 {
            student_t_logpdf_unchecked(obs, p.nu, yhat, scale, log_norm)
        } else {
            // A degenerate scale is only usable for filtering.
            f64::NEG_INFINITY
        };
        level = (p.alpha * obs / s_next + (1.0 - p.alpha) * level).max(LEVEL_FLOOR);
        if !(yhat.is_finite() && scale >= 0.0 && level.is_finite()) {
            return Err(Error::NonFiniteRecursion { t: t + 2 });
        }
        if let Some(r) = record.as_deref_mut() {
            r.yhat.push(yhat);
            r.sigma_hat.push(scale);
            r.levels.push(level);
        }
    }
    debug_assert_eq!(factors.len(), n + m);
    Ok(loglik)
}

/// SGT over one seasonal training series.
#[derive(Debug, Clone)]
pub struct SgtModel {
    y: Vec<f64>,
    period: usize,
    priors: Priors,
}

impl SgtModel {
    pub fn new(y: &[f64], period: usize, priors: &PriorConfig) -> Result<Self> {
        if period < 2 {
            return Err(Error::InvalidArgument(format!(
                "SGT needs a seasonal period of at least 2, got {period}"
            )));
        }
        if y.len() < 2 * period {
            return Err(Error::InvalidArgument(format!(
                "SGT with period {period} needs at least {} observations, got {}",
                2 * period,
                y.len()
            )));
        }
        if y.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument("series must be strictly positive".into()));
        }
        Ok(Self {
            y: y.to_vec(),
            period,
            priors: priors.resolve(y)?,
        })
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn forward(&self, params: &SgtParams) -> Result<ForwardPass> {
        sgt_forward(&self.y, params)
    }

    fn boxes(&self) -> [(&'static str, Bound); 8] {
        let b = &self.priors.bounds;
        [
            ("nu", b.nu),
            ("gamma", b.gamma),
            ("rho", b.rho),
            ("alpha", b.alpha),
            ("zeta", b.zeta),
            ("sigma", b.sigma),
            ("tau", b.tau),
            ("xi", b.xi),
        ]
    }

    fn scalars(p: &SgtParams) -> [f64; 8] {
        [p.nu, p.gamma, p.rho, p.alpha, p.zeta, p.sigma, p.tau, p.xi]
    }

    /// Initial factors from the first cycle's ratios to its mean.
    fn first_cycle_factors(&self) -> Vec<f64> {
        let cycle = &self.y[..self.period];
        let mean = cycle.iter().sum::<f64>() / self.period as f64;
        let mut s: Vec<f64> = cycle.iter().map(|v| v / mean).collect();
        normalize_seasonal(&mut s);
        s
    }
}

impl Model for SgtModel {
    type Params = SgtParams;
    type State = SgtState;

    fn kind(&self) -> ModelKind {
        ModelKind::Sgt
    }

    fn data(&self) -> &[f64] {
        &self.y
    }

    fn priors(&self) -> &Priors {
        &self.priors
    }

    fn param_names(&self) -> Vec<String> {
        let mut names: Vec<String> = ["nu", "gamma", "rho", "alpha", "zeta", "sigma", "tau", "xi", "l1"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        names.extend((1..=self.period).map(|i| format!("s{i}")));
        names
    }

    fn flatten(&self, p: &SgtParams) -> Vec<f64> {
        let mut v = Self::scalars(p).to_vec();
        v.push(p.l1);
        v.extend_from_slice(&p.s_init);
        v
    }

    fn unflatten(&self, v: &[f64]) -> Result<SgtParams> {
        if v.len() != 9 + self.period {
            return Err(Error::InvalidArgument(format!(
                "SGT draw needs {} values, got {}",
                9 + self.period,
                v.len()
            )));
        }
        let p = SgtParams {
            nu: v[0],
            gamma: v[1],
            rho: v[2],
            alpha: v[3],
            zeta: v[4],
            sigma: v[5],
            tau: v[6],
            xi: v[7],
            l1: v[8],
            s_init: v[9..].to_vec(),
        };
        if !self.in_bounds(&p) {
            return Err(Error::InvalidArgument(format!("SGT draw outside its boxes: {p:?}")));
        }
        Ok(p)
    }

    fn dim(&self) -> usize {
        8 + self.period - 1
    }

    fn to_unconstrained(&self, p: &SgtParams) -> Result<Vec<f64>> {
        let mut u = self
            .boxes()
            .iter()
            .zip(Self::scalars(p))
            .map(|((name, b), x)| b.to_unconstrained(name, x))
            .collect::<Result<Vec<f64>>>()?;
        u.extend(seasonal_to_free(&p.s_init)?);
        Ok(u)
    }

    fn from_unconstrained(&self, u: &[f64]) -> Result<(SgtParams, f64)> {
        if u.len() != self.dim() || u.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("bad unconstrained vector".into()));
        }
        let mut log_jac = 0.0;
        let mut x = [0.0; 8];
        for (i, ((_, b), &ui)) in self.boxes().iter().zip(u).enumerate() {
            let (xi, lj) = b.from_unconstrained(ui);
            x[i] = xi;
            log_jac += lj;
        }
        // The seasonal prior is defined directly on the free coordinates.
        let s_init = seasonal_from_free(&u[8..]);
        let l1 = self.y[0] / s_init[0];
        Ok((
            SgtParams {
                nu: x[0],
                gamma: x[1],
                rho: x[2],
                alpha: x[3],
                zeta: x[4],
                sigma: x[5],
                tau: x[6],
                xi: x[7],
                s_init,
                l1,
            },
            log_jac,
        ))
    }

    fn in_bounds(&self, p: &SgtParams) -> bool {
        let scalars_ok = self
            .boxes()
            .iter()
            .zip(Self::scalars(p))
            .all(|((_, b), x)| x.is_finite() && b.contains(x));
        let mean = p.s_init.iter().sum::<f64>() / p.s_init.len().max(1) as f64;
        scalars_ok
            && p.s_init.len() == self.period
            && p.s_init.iter().all(|&s| s > 0.0 && s.is_finite())
            && (mean - 1.0).abs() <= 1e-12
            && p.l1.is_finite()
    }

    fn log_prior(&self, p: &SgtParams) -> f64 {
        if !self.in_bounds(p) {
            return f64::NEG_INFINITY;
        }
        let pr = &self.priors;
        let b = &pr.bounds;
        Priors::log_uniform(b.nu, p.nu)
            + Priors::log_uniform(b.rho, p.rho)
            + Priors::log_uniform(b.tau, p.tau)
            + pr.log_gamma(p.gamma)
            + pr.log_alpha(p.alpha)
            + pr.log_zeta(p.zeta)
            + pr.log_sigma(p.sigma)
            + pr.log_xi(p.xi)
            + pr.log_seasonal(&p.s_init)
    }

    fn log_likelihood(&self, p: &SgtParams) -> f64 {
        let mut factors = Vec::with_capacity(self.y.len() + self.period);
        run(&self.y, p, &mut factors, None).unwrap_or(f64::NEG_INFINITY)
    }

    fn initial_params(&self) -> SgtParams {
        let b = &self.priors.bounds;
        let s_init = self.first_cycle_factors();
        let mean_y = self.y.iter().sum::<f64>() / self.y.len() as f64;
        let tau = interior(b.tau, 0.2);
        SgtParams {
            nu: interior(b.nu, 6.0),
            gamma: interior(b.gamma, 0.0),
            rho: interior(b.rho, 0.3),
            alpha: interior(b.alpha, 0.5),
            zeta: interior(b.zeta, 0.2),
            sigma: interior(b.sigma, 0.5 * self.priors.sigma_scale / mean_y.max(1.0).powf(tau)),
            tau,
            xi: 0.5 * self.priors.xi_scale,
            l1: self.y[0] / s_init[0],
            s_init,
        }
    }

    fn sample_prior(&self, rng: &mut RngState) -> Result<SgtParams> {
        let pr = &self.priors;
        let b = &pr.bounds;
        let mut s_init = (0..self.period)
            .map(|_| Ok(sample_cauchy(rng, 0.0, pr.season_scale)?.clamp(-20.0, 20.0).exp()))
            .collect::<Result<Vec<f64>>>()?;
        normalize_seasonal(&mut s_init);
        // Round-trip through the free coordinates so the mean is exactly one.
        let s_init = seasonal_from_free(&seasonal_to_free(&s_init)?);
        Ok(SgtParams {
            nu: uniform_in(rng, b.nu),
            gamma: cauchy_in(rng, pr.gamma_loc, pr.gamma_scale, b.gamma),
            rho: uniform_in(rng, b.rho),
            alpha: sample_beta(rng, pr.alpha.0, pr.alpha.1)?,
            zeta: sample_beta(rng, pr.zeta.0, pr.zeta.1)?,
            sigma: cauchy_in(rng, 0.0, pr.sigma_scale, Bound::new(b.sigma.lo.max(0.0), b.sigma.hi)),
            tau: uniform_in(rng, b.tau),
            xi: cauchy_in(rng, 0.0, pr.xi_scale, Bound::POSITIVE),
            l1: self.y[0] / s_init[0],
            s_init,
        })
    }

    fn final_state(&self, p: &SgtParams) -> Result<SgtState> {
        let pass = self.forward(p)?;
        let n = self.y.len();
        Ok(SgtState {
            level: *pass.levels.last().expect("non-empty"),
            factors: pass.seasonal[n..n + self.period].to_vec(),
        })
    }

    fn simulate_path(
        &self,
        p: &SgtParams,
        state: &SgtState,
        rng: &mut RngState,
        out: &mut [f64],
    ) -> Result<()> {
        let m = state.factors.len();
        let mut level = state.level.max(LEVEL_FLOOR);
        for (k, slot) in out.iter_mut().enumerate() {
            let s = state.factors[k % m];
            let yhat = (level + p.gamma * level.powf(p.rho)) * s;
            let scale = error_scale(yhat, p.sigma, p.tau, p.xi);
            let draw = (yhat + scale * sample_student_t(rng, p.nu)?).max(LEVEL_FLOOR);
            level = (p.alpha * draw / s + (1.0 - p.alpha) * level).max(LEVEL_FLOOR);
            if !draw.is_finite() {
                return Err(Error::Sampler("simulated path diverged".into()));
            }
            *slot = draw;
        }
        Ok(())
    }
}
