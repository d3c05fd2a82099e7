//! Random-number generation and the distribution primitives used by the
//! models and samplers.
//!
//! Every sampler takes an explicit [`RngState`]; nothing here touches a
//! thread-local generator, so a fixed seed reproduces a run bit for bit.

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};
use statrs::function::erf::erfc_inv;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::error::{Error, Result};

/// Seeded ChaCha8 stream.
///
/// Workers never share a state; each derives its own with
/// [`RngState::for_stream`].
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for worker `stream` under a master seed:
    /// `seed XOR splitmix64(stream)`.
    pub fn for_stream(seed: u64, stream: u64) -> Self {
        Self::from_seed(seed ^ splitmix64(stream))
    }

    /// Child stream derived from this state's seed.
    pub fn split(&self, stream: u64) -> Self {
        Self::for_stream(self.seed, stream)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// SplitMix64 finalizer, used as the stream hash.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {x}")))
    }
}

// ---------------------------------------------------------------------------
// log densities

/// Normalizing constant of the standard Student-t with `nu` degrees of freedom.
pub fn student_t_log_norm(nu: f64) -> f64 {
    ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * PI).ln()
}

/// Log density of the location-scale Student-t distribution.
pub fn student_t_logpdf(x: f64, nu: f64, loc: f64, scale: f64) -> Result<f64> {
    check_positive("nu", nu)?;
    check_positive("scale", scale)?;
    Ok(student_t_logpdf_unchecked(
        x,
        nu,
        loc,
        scale,
        student_t_log_norm(nu),
    ))
}

/// Hot-loop variant with a precomputed [`student_t_log_norm`].
#[inline]
pub(crate) fn student_t_logpdf_unchecked(x: f64, nu: f64, loc: f64, scale: f64, log_norm: f64) -> f64 {
    let z = (x - loc) / scale;
    log_norm - scale.ln() - 0.5 * (nu + 1.0) * (z * z / nu).ln_1p()
}

pub fn normal_logpdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    -0.5 * z * z - sd.ln() - 0.5 * (2.0 * PI).ln()
}

pub fn cauchy_logpdf(x: f64, loc: f64, scale: f64) -> f64 {
    let z = (x - loc) / scale;
    -(PI * scale).ln() - z.mul_add(z, 1.0).ln()
}

/// Half-Cauchy on `(0, inf)`; `-inf` elsewhere.
pub fn half_cauchy_logpdf(x: f64, scale: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    std::f64::consts::LN_2 + cauchy_logpdf(x, 0.0, scale)
}

pub fn beta_logpdf(x: f64, a: f64, b: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return f64::NEG_INFINITY;
    }
    let ln_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    let term = |w: f64, p: f64| if w == 1.0 { 0.0 } else { (w - 1.0) * p.ln() };
    term(a, x) + term(b, 1.0 - x) - ln_beta
}

/// Inverse-gamma with density proportional to `x^(-a-1) exp(-b/x)`.
pub fn inverse_gamma_logpdf(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    a * b.ln() - ln_gamma(a) - (a + 1.0) * x.ln() - b / x
}

/// Standard normal quantile function.
pub fn normal_quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
}

// ---------------------------------------------------------------------------
// samplers

pub fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Gamma with the given shape and *rate*.
pub fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, rate: f64) -> Result<f64> {
    check_positive("shape", shape)?;
    check_positive("rate", rate)?;
    let g = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::param("shape", e.to_string()))?;
    Ok(g.sample(rng))
}

/// Inverse-gamma `IG(a, b)` with density proportional to `x^(-a-1) e^(-b/x)`.
pub fn sample_inverse_gamma<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> Result<f64> {
    loop {
        let g = sample_gamma(rng, a, b)?;
        // A gamma draw can underflow to zero for tiny shapes.
        if g > 0.0 {
            return Ok(1.0 / g);
        }
    }
}

/// `IG(a, b)` restricted to `(0, upper]`.
pub fn sample_inverse_gamma_truncated<R: Rng + ?Sized>(
    rng: &mut R,
    a: f64,
    b: f64,
    upper: f64,
) -> Result<f64> {
    if upper == f64::INFINITY {
        return sample_inverse_gamma(rng, a, b);
    }
    check_positive("upper", upper)?;
    check_positive("shape", a)?;
    check_positive("rate", b)?;
    // x <= upper  <=>  g = 1/x >= lower, with g ~ Gamma(a, rate b).
    let lower = 1.0 / upper;
    let tail = gamma_ur(a, b * lower);
    if tail > 0.05 {
        loop {
            let g = sample_gamma(rng, a, b)?;
            if g >= lower {
                return Ok(1.0 / g);
            }
        }
    }
    // Inverse-CDF on the upper tail: solve Q(a, b g) = u * tail by bisection
    // in log space.
    let target = rng.random::<f64>() * tail;
    let mut lo = lower.ln();
    let mut hi = lo + 1.0;
    while gamma_ur(a, b * hi.exp()) > target {
        hi += 2.0 * (hi - lo);
        if hi > 700.0 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gamma_ur(a, b * mid.exp()) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok((-0.5 * (lo + hi)).exp().min(upper))
}

/// Normal `N(mean, sd^2)` conditioned on `[lower, upper]`; either bound may
/// be infinite.
///
/// Uses the accept-reject scheme of Robert (1995): a normal or uniform
/// proposal when the interval holds substantial mass near the mode, and an
/// exponential proposal for tail intervals, which stays exact many standard
/// deviations out.
pub fn sample_truncated_normal<R: Rng + ?Sized>(
    rng: &mut R,
    mean: f64,
    sd: f64,
    lower: f64,
    upper: f64,
) -> Result<f64> {
    check_positive("sd", sd)?;
    if lower.is_nan() || upper.is_nan() || lower >= upper {
        return Err(Error::param(
            "bounds",
            format!("need lower < upper, got [{lower}, {upper}]"),
        ));
    }
    if !mean.is_finite() {
        return Err(Error::param("mean", format!("must be finite, got {mean}")));
    }
    let a = (lower - mean) / sd;
    let b = (upper - mean) / sd;
    let z = if a >= 0.0 {
        tail_normal(rng, a, b)
    } else if b <= 0.0 {
        -tail_normal(rng, -b, -a)
    } else {
        central_normal(rng, a, b)
    };
    Ok((mean + sd * z).clamp(lower, upper))
}

/// Standard normal on `[a, b]` with `a < 0 < b`.
fn central_normal<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    if b - a >= (2.0 * PI).sqrt() {
        loop {
            let z = sample_standard_normal(rng);
            if z >= a && z <= b {
                return z;
            }
        }
    }
    loop {
        let z = a + (b - a) * rng.random::<f64>();
        if rng.random::<f64>() <= (-0.5 * z * z).exp() {
            return z;
        }
    }
}

/// Standard normal on `[a, b]` with `0 <= a < b` (b may be infinite).
fn tail_normal<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    let rate = 0.5 * (a + (a * a + 4.0).sqrt());
    let use_exponential = b == f64::INFINITY
        || b >= a + (2.0 * 0.5f64.exp().sqrt() / (a + (a * a + 4.0).sqrt()))
            * ((a * a - a * (a * a + 4.0).sqrt()) / 4.0).exp();
    if use_exponential {
        loop {
            let u: f64 = rng.random();
            let z = a - (1.0 - u).ln() / rate;
            if z > b {
                continue;
            }
            let accept = (-0.5 * (z - rate) * (z - rate)).exp();
            if rng.random::<f64>() <= accept {
                return z;
            }
        }
    }
    loop {
        let z = a + (b - a) * rng.random::<f64>();
        if rng.random::<f64>() <= (0.5 * (a * a - z * z)).exp() {
            return z;
        }
    }
}

pub fn sample_beta<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> Result<f64> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    let dist = Beta::new(a, b).map_err(|e| Error::param("a", e.to_string()))?;
    Ok(dist.sample(rng))
}

pub fn sample_cauchy<R: Rng + ?Sized>(rng: &mut R, loc: f64, scale: f64) -> Result<f64> {
    check_positive("scale", scale)?;
    if !loc.is_finite() {
        return Err(Error::param("loc", format!("must be finite, got {loc}")));
    }
    // Inverse CDF; u in (0, 1) keeps tan finite.
    let u: f64 = rng.random_range(f64::EPSILON..1.0);
    Ok(loc + scale * (PI * (u - 0.5)).tan())
}

pub fn sample_half_cauchy<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Result<f64> {
    loop {
        let x = sample_cauchy(rng, 0.0, scale)?.abs();
        if x > 0.0 {
            return Ok(x);
        }
    }
}

/// Draw `x` with `ln x ~ Cauchy(loc, scale)`.
pub fn sample_log_cauchy<R: Rng + ?Sized>(rng: &mut R, loc: f64, scale: f64) -> Result<f64> {
    // exp over- or underflows in the far Cauchy tails; keep the draw inside
    // the positive finite range.
    Ok(sample_cauchy(rng, loc, scale)?.exp().clamp(f64::MIN_POSITIVE, f64::MAX))
}

/// Draw from a Student-t with `nu` degrees of freedom, location 0, scale 1.
pub fn sample_student_t<R: Rng + ?Sized>(rng: &mut R, nu: f64) -> Result<f64> {
    check_positive("nu", nu)?;
    let z = sample_standard_normal(rng);
    let chi2 = 2.0 * sample_gamma(rng, 0.5 * nu, 1.0)?;
    Ok(z / (chi2 / nu).sqrt())
}
