//! Box constraints and the bijections that map them onto the real line.

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub lo: f64,
    pub hi: f64,
}

impl Bound {
    pub const REAL: Bound = Bound {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    pub const POSITIVE: Bound = Bound {
        lo: 0.0,
        hi: f64::INFINITY,
    };
    pub const UNIT: Bound = Bound { lo: 0.0, hi: 1.0 };

    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn is_valid(&self) -> bool {
        !self.lo.is_nan() && !self.hi.is_nan() && self.lo < self.hi
    }

    /// Map a point of the box onto the real line.
    ///
    /// Points on a finite edge map to an infinite value and are rejected.
    pub fn to_unconstrained(&self, name: &'static str, x: f64) -> Result<f64> {
        if !x.is_finite() || !self.contains(x) {
            return Err(Error::param(
                name,
                format!("{x} outside [{}, {}]", self.lo, self.hi),
            ));
        }
        let u = match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => {
                let p = (x - self.lo) / (self.hi - self.lo);
                (p / (1.0 - p)).ln()
            }
            (true, false) => (x - self.lo).ln(),
            (false, true) => (self.hi - x).ln(),
            (false, false) => x,
        };
        if u.is_finite() {
            Ok(u)
        } else {
            Err(Error::param(
                name,
                format!("{x} lies on the boundary of [{}, {}]", self.lo, self.hi),
            ))
        }
    }

    /// Inverse of [`Bound::to_unconstrained`], with `log |dx/du|`.
    pub fn from_unconstrained(&self, u: f64) -> (f64, f64) {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => {
                let width = self.hi - self.lo;
                let (p, log_p, log_q) = logistic(u);
                let x = (self.lo + width * p).clamp(self.lo, self.hi);
                (x, width.ln() + log_p + log_q)
            }
            (true, false) => (self.lo + u.exp(), u),
            (false, true) => (self.hi - u.exp(), u),
            (false, false) => (u, 0.0),
        }
    }
}

/// `(sigmoid(u), ln sigmoid(u), ln sigmoid(-u))`, stable for large `|u|`.
fn logistic(u: f64) -> (f64, f64, f64) {
    let softplus = |v: f64| if v > 0.0 { v + (-v).exp().ln_1p() } else { v.exp().ln_1p() };
    let log_p = -softplus(-u);
    let log_q = -softplus(u);
    (log_p.exp(), log_p, log_q)
}

/// Map `m - 1` free coordinates to `m` positive factors with mean exactly one.
///
/// `s_i = m * exp(z_i) / sum_j exp(z_j)` with `z_m = 0`, so the all-zero
/// vector is the neutral point `s = (1, ..., 1)`.
pub fn seasonal_from_free(free: &[f64]) -> Vec<f64> {
    let m = free.len() + 1;
    let max = free.iter().copied().fold(0.0, f64::max);
    let mut s: Vec<f64> = free.iter().map(|z| (z - max).exp()).collect();
    s.push((-max).exp());
    let total: f64 = s.iter().sum();
    let scale = m as f64 / total;
    for v in &mut s {
        *v *= scale;
    }
    s
}

/// Inverse of [`seasonal_from_free`]: `z_i = ln s_i - ln s_m`.
pub fn seasonal_to_free(s: &[f64]) -> Result<Vec<f64>> {
    if s.len() < 2 {
        return Err(Error::param("s_init", "needs at least two factors"));
    }
    if s.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::param("s_init", "factors must be positive and finite"));
    }
    let last = s[s.len() - 1].ln();
    Ok(s[..s.len() - 1].iter().map(|v| v.ln() - last).collect())
}

/// Rescale positive factors to mean one.
pub fn normalize_seasonal(s: &mut [f64]) {
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    for v in s {
        *v /= mean;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn logit_midpoint() {
        assert_eq!(Bound::UNIT.to_unconstrained("alpha", 0.5).unwrap(), 0.0);
        assert!(Bound::UNIT.to_unconstrained("alpha", 1.0).is_err());
        assert!(Bound::UNIT.to_unconstrained("alpha", 1.5).is_err());
    }

    #[test]
    fn jacobian_matches_finite_difference() {
        let bounds = [Bound::new(-0.5, 1.0), Bound::POSITIVE, Bound::new(f64::NEG_INFINITY, 3.0), Bound::REAL];
        for b in bounds {
            for &u in &[-3.0, -0.2, 0.0, 1.7, 6.0] {
                let h = 1e-6;
                let (xp, _) = b.from_unconstrained(u + h);
                let (xm, _) = b.from_unconstrained(u - h);
                let (_, log_j) = b.from_unconstrained(u);
                let fd = ((xp - xm) / (2.0 * h)).abs().ln();
                assert!((fd - log_j).abs() < 1e-6, "{b:?} u={u}: {fd} vs {log_j}");
            }
        }
    }

    #[test]
    fn seasonal_neutral_point() {
        assert_eq!(seasonal_from_free(&[0.0, 0.0, 0.0]), vec![1.0; 4]);
    }

    proptest! {
        #[test]
        fn box_round_trip(lo in -5.0f64..5.0, width in 0.01f64..10.0, p in 0.001f64..0.999) {
            let b = Bound::new(lo, lo + width);
            let x = lo + p * width;
            let u = b.to_unconstrained("x", x).unwrap();
            let (back, _) = b.from_unconstrained(u);
            prop_assert!((back - x).abs() <= 1e-12 * (1.0 + x.abs()));
        }

        #[test]
        fn seasonal_mean_is_one(free in prop::collection::vec(-30.0f64..30.0, 1..12)) {
            let s = seasonal_from_free(&free);
            let mean = s.iter().sum::<f64>() / s.len() as f64;
            prop_assert!((mean - 1.0).abs() < 1e-12);
            prop_assert!(s.iter().all(|&v| v >= 0.0));
        }

        #[test]
        fn seasonal_round_trip(free in prop::collection::vec(-5.0f64..5.0, 1..12)) {
            let back = seasonal_to_free(&seasonal_from_free(&free)).unwrap();
            for (a, b) in free.iter().zip(&back) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
