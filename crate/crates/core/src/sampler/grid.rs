use rand::Rng;

use crate::error::{Error, Result};

/// Index drawn with probability proportional to `exp(log_weights[i])`.
pub fn grid_sample_index<R: Rng + ?Sized>(rng: &mut R, log_weights: &[f64]) -> Result<usize> {
    if log_weights.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if log_weights.iter().any(|w| w.is_nan() || *w == f64::INFINITY) {
        return Err(Error::InvalidArgument("grid weights must be finite or -inf".into()));
    }
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::Sampler("every grid weight is zero".into()));
    }
    let weights: Vec<f64> = log_weights.iter().map(|w| (w - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return Ok(i);
        }
        u -= w;
    }
    // Rounding can leave u just above the last weight.
    Ok(weights.iter().rposition(|&w| w > 0.0).expect("max weight is positive"))
}

/// Categorical draw from `grid` with log-sum-exp stabilized weights.
pub fn grid_sample<R: Rng + ?Sized>(rng: &mut R, grid: &[f64], log_weights: &[f64]) -> Result<f64> {
    if grid.len() != log_weights.len() {
        return Err(Error::InvalidArgument(format!(
            "grid has {} points but {} weights",
            grid.len(),
            log_weights.len()
        )));
    }
    Ok(grid[grid_sample_index(rng, log_weights)?])
}
