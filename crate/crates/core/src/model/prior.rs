//! Prior families, their hyperparameters and parameter boxes.

use super::transform::Bound;
use crate::error::{Error, Result};
use crate::rand_dist::{beta_logpdf, cauchy_logpdf, half_cauchy_logpdf};

/// User-facing prior settings.
///
/// Scales left as `None` are derived from the training data by
/// [`PriorConfig::resolve`]: with `c = mean |y_t - y_{t-1}|`, the global-trend
/// coefficient and initial trend get `Cauchy(0, c)`, the error coefficient
/// `sigma` gets half-Cauchy with scale `c`, and the error floor `xi` gets
/// half-Cauchy with scale `0.01 * mean(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorConfig {
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
    pub zeta: (f64, f64),
    pub gamma_loc: f64,
    pub gamma_scale: Option<f64>,
    pub lambda_loc: f64,
    pub lambda_scale: f64,
    pub sigma_scale: Option<f64>,
    pub xi_scale: Option<f64>,
    pub b1_scale: Option<f64>,
    /// Cauchy scale of `ln s_i` for the initial seasonal factors.
    pub season_scale: f64,
    pub nu: Bound,
    pub rho: Bound,
    pub tau: Bound,
    /// Widen the local-trend coefficient box from `[0, 1]` to `[-1, 1]`.
    pub lambda_wide: bool,
    pub gamma: Bound,
    pub sigma: Bound,
    pub b1: Bound,
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self {
            alpha: (1.0, 1.0),
            beta: (1.0, 1.0),
            zeta: (1.0, 1.0),
            gamma_loc: 0.0,
            gamma_scale: None,
            lambda_loc: 0.0,
            lambda_scale: 1.0,
            sigma_scale: None,
            xi_scale: None,
            b1_scale: None,
            season_scale: 0.3,
            nu: Bound::new(2.0, 20.0),
            rho: Bound::new(-0.5, 1.0),
            tau: Bound::UNIT,
            lambda_wide: false,
            gamma: Bound::REAL,
            sigma: Bound::POSITIVE,
            b1: Bound::REAL,
        }
    }
}

/// Keys accepted by [`PriorConfig::set`], in documentation order.
pub const PRIOR_KEYS: &[&str] = &[
    "alpha_a", "alpha_b", "beta_a", "beta_b", "zeta_a", "zeta_b", "gamma_loc", "gamma_scale",
    "gamma_min", "gamma_max", "lambda_loc", "lambda_scale", "lambda_wide", "sigma_scale",
    "sigma_max", "xi_scale", "b1_scale", "b1_min", "b1_max", "season_scale", "nu_min", "nu_max",
    "rho_min", "rho_max", "tau_min", "tau_max",
];

impl PriorConfig {
    /// Set one hyperparameter by key (see [`PRIOR_KEYS`]).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |msg: String| Error::InvalidArgument(format!("prior {key}: {msg}"));
        if key == "lambda_wide" {
            self.lambda_wide = match value {
                "true" | "1" | "yes" => true,
                "false" | "0" | "no" => false,
                _ => return Err(bad(format!("expected a boolean, got {value:?}"))),
            };
            return Ok(());
        }
        let x: f64 = value
            .parse()
            .map_err(|_| bad(format!("expected a number, got {value:?}")))?;
        if x.is_nan() {
            return Err(bad("NaN is not allowed".into()));
        }
        match key {
            "alpha_a" => self.alpha.0 = x,
            "alpha_b" => self.alpha.1 = x,
            "beta_a" => self.beta.0 = x,
            "beta_b" => self.beta.1 = x,
            "zeta_a" => self.zeta.0 = x,
            "zeta_b" => self.zeta.1 = x,
            "gamma_loc" => self.gamma_loc = x,
            "gamma_scale" => self.gamma_scale = Some(x),
            "gamma_min" => self.gamma.lo = x,
            "gamma_max" => self.gamma.hi = x,
            "lambda_loc" => self.lambda_loc = x,
            "lambda_scale" => self.lambda_scale = x,
            "sigma_scale" => self.sigma_scale = Some(x),
            "sigma_max" => self.sigma.hi = x,
            "xi_scale" => self.xi_scale = Some(x),
            "b1_scale" => self.b1_scale = Some(x),
            "b1_min" => self.b1.lo = x,
            "b1_max" => self.b1.hi = x,
            "season_scale" => self.season_scale = x,
            "nu_min" => self.nu.lo = x,
            "nu_max" => self.nu.hi = x,
            "rho_min" => self.rho.lo = x,
            "rho_max" => self.rho.hi = x,
            "tau_min" => self.tau.lo = x,
            "tau_max" => self.tau.hi = x,
            _ => return Err(Error::InvalidArgument(format!("unknown prior key {key:?}"))),
        }
        Ok(())
    }

    /// Fill in data-dependent scales and validate.
    pub fn resolve(&self, y: &[f64]) -> Result<Priors> {
        let mean_y = y.iter().sum::<f64>() / y.len().max(1) as f64;
        let mean_abs_diff = if y.len() > 1 {
            y.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (y.len() - 1) as f64
        } else {
            0.0
        };
        // Flat data still needs positive scales.
        let floor = 1e-3 * mean_y.abs().max(1e-3);
        let c = mean_abs_diff.max(floor);
        let priors = Priors {
            alpha: self.alpha,
            beta: self.beta,
            zeta: self.zeta,
            gamma_loc: self.gamma_loc,
            gamma_scale: self.gamma_scale.unwrap_or(c),
            lambda_loc: self.lambda_loc,
            lambda_scale: self.lambda_scale,
            sigma_scale: self.sigma_scale.unwrap_or(c),
            xi_scale: self.xi_scale.unwrap_or((0.01 * mean_y.abs()).max(floor)),
            b1_scale: self.b1_scale.unwrap_or(c),
            season_scale: self.season_scale,
            bounds: ParamBounds {
                nu: self.nu,
                gamma: self.gamma,
                rho: self.rho,
                lambda: if self.lambda_wide {
                    Bound::new(-1.0, 1.0)
                } else {
                    Bound::UNIT
                },
                alpha: Bound::UNIT,
                beta: Bound::UNIT,
                zeta: Bound::UNIT,
                sigma: self.sigma,
                tau: self.tau,
                xi: Bound::POSITIVE,
                b1: self.b1,
            },
        };
        priors.validate()?;
        Ok(priors)
    }
}

/// Boxes for every scalar parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBounds {
    pub nu: Bound,
    pub gamma: Bound,
    pub rho: Bound,
    pub lambda: Bound,
    pub alpha: Bound,
    pub beta: Bound,
    pub zeta: Bound,
    pub sigma: Bound,
    pub tau: Bound,
    pub xi: Bound,
    pub b1: Bound,
}

/// Fully resolved hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Priors {
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
    pub zeta: (f64, f64),
    pub gamma_loc: f64,
    pub gamma_scale: f64,
    pub lambda_loc: f64,
    pub lambda_scale: f64,
    pub sigma_scale: f64,
    pub xi_scale: f64,
    pub b1_scale: f64,
    pub season_scale: f64,
    pub bounds: ParamBounds,
}

impl Priors {
    fn validate(&self) -> Result<()> {
        let positive = [
            ("alpha", self.alpha.0),
            ("alpha", self.alpha.1),
            ("beta", self.beta.0),
            ("beta", self.beta.1),
            ("zeta", self.zeta.0),
            ("zeta", self.zeta.1),
            ("gamma", self.gamma_scale),
            ("lambda", self.lambda_scale),
            ("sigma", self.sigma_scale),
            ("xi", self.xi_scale),
            ("b1", self.b1_scale),
            ("s_init", self.season_scale),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("prior hyperparameter must be positive, got {v}")));
            }
        }
        let b = &self.bounds;
        let boxes = [
            ("nu", b.nu),
            ("gamma", b.gamma),
            ("rho", b.rho),
            ("lambda", b.lambda),
            ("sigma", b.sigma),
            ("tau", b.tau),
            ("b1", b.b1),
        ];
        for (name, bx) in boxes {
            if !bx.is_valid() {
                return Err(Error::param(name, format!("empty box [{}, {}]", bx.lo, bx.hi)));
            }
        }
        if b.nu.lo <= 0.0 {
            return Err(Error::param("nu", "degrees of freedom must stay positive"));
        }
        if b.sigma.lo < 0.0 {
            return Err(Error::param("sigma", "lower bound must be non-negative"));
        }
        Ok(())
    }

    pub fn log_alpha(&self, x: f64) -> f64 {
        beta_logpdf(x, self.alpha.0, self.alpha.1)
    }

    pub fn log_beta(&self, x: f64) -> f64 {
        beta_logpdf(x, self.beta.0, self.beta.1)
    }

    pub fn log_zeta(&self, x: f64) -> f64 {
        beta_logpdf(x, self.zeta.0, self.zeta.1)
    }

    /// Cauchy restricted to the gamma box (unnormalized on the box).
    pub fn log_gamma(&self, x: f64) -> f64 {
        restrict(self.bounds.gamma, x, cauchy_logpdf(x, self.gamma_loc, self.gamma_scale))
    }

    pub fn log_lambda(&self, x: f64) -> f64 {
        restrict(self.bounds.lambda, x, cauchy_logpdf(x, self.lambda_loc, self.lambda_scale))
    }

    pub fn log_sigma(&self, x: f64) -> f64 {
        restrict(self.bounds.sigma, x, half_cauchy_logpdf(x, self.sigma_scale))
    }

    pub fn log_xi(&self, x: f64) -> f64 {
        half_cauchy_logpdf(x, self.xi_scale)
    }

    pub fn log_b1(&self, x: f64) -> f64 {
        restrict(self.bounds.b1, x, cauchy_logpdf(x, 0.0, self.b1_scale))
    }

    /// Uniform densities over the boxes of `nu`, `rho`, `tau`.
    pub fn log_uniform(bound: Bound, x: f64) -> f64 {
        if bound.contains(x) {
            -(bound.hi - bound.lo).ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    /// `sum_i ln Cauchy(ln s_i; 0, season_scale)`, taken as a density on the
    /// free log-ratio coordinates of the factors.
    pub fn log_seasonal(&self, s: &[f64]) -> f64 {
        s.iter()
            .map(|&v| {
                if v > 0.0 {
                    cauchy_logpdf(v.ln(), 0.0, self.season_scale)
                } else {
                    f64::NEG_INFINITY
                }
            })
            .sum()
    }
}

fn restrict(bound: Bound, x: f64, logp: f64) -> f64 {
    if bound.contains(x) {
        logp
    } else {
        f64::NEG_INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn priors() -> Priors {
        PriorConfig::default().resolve(&[10.0, 12.0, 11.0, 15.0, 14.0]).unwrap()
    }

    #[test]
    fn data_adaptive_scales() {
        let p = priors();
        // mean |diff| = (2 + 1 + 4 + 1) / 4
        assert_eq!(p.gamma_scale, 2.0);
        assert_eq!(p.sigma_scale, 2.0);
        assert!((p.xi_scale - 0.124).abs() < 1e-12);
        let flat = PriorConfig::default().resolve(&[7.0; 6]).unwrap();
        assert!(flat.gamma_scale > 0.0);
    }

    #[test]
    fn cauchy_doubling_ratio() {
        let p = priors();
        let c = p.gamma_scale;
        for &g in &[0.3, 1.0, 5.0] {
            let drop = p.log_gamma(g) - p.log_gamma(2.0 * g);
            let expected = ((1.0 + (2.0 * g / c).powi(2)) / (1.0 + (g / c).powi(2))).ln();
            assert!((drop - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn set_keys() {
        let mut cfg = PriorConfig::default();
        for key in PRIOR_KEYS {
            let value = if *key == "lambda_wide" { "true" } else { "0.5" };
            cfg.set(key, value).unwrap();
        }
        assert!(cfg.lambda_wide);
        assert!(cfg.set("nope", "1").is_err());
        assert!(cfg.set("alpha_a", "abc").is_err());
        let mut bad = PriorConfig::default();
        bad.set("nu_min", "30").unwrap();
        assert!(bad.resolve(&[1.0, 2.0]).is_err());
    }
}
