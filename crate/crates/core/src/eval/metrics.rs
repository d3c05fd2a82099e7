//! Point and interval accuracy measures.

use crate::error::{Error, Result};

fn same_length(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Metric(format!("length mismatch: {} actuals vs {} forecasts", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::Metric("empty horizon".into()));
    }
    Ok(())
}

/// Symmetric MAPE in percent: `(200 / h) * sum |y - f| / (|y| + |f|)`.
pub fn smape(actuals: &[f64], forecasts: &[f64]) -> Result<f64> {
    same_length(actuals, forecasts)?;
    let mut total = 0.0;
    for (k, (y, f)) in actuals.iter().zip(forecasts).enumerate() {
        let denom = y.abs() + f.abs();
        if denom == 0.0 {
            return Err(Error::Metric(format!("sMAPE undefined at step {}: |y| + |f| = 0", k + 1)));
        }
        total += (y - f).abs() / denom;
    }
    Ok(200.0 * total / actuals.len() as f64)
}

/// In-sample mean absolute seasonal difference at lag `s`.
pub fn seasonal_naive_scale(insample: &[f64], s: usize) -> Result<f64> {
    if s == 0 || insample.len() <= s {
        return Err(Error::Metric(format!(
            "need more than {s} in-sample values for lag-{s} scaling, got {}",
            insample.len()
        )));
    }
    let scale = insample.windows(s + 1).map(|w| (w[s] - w[0]).abs()).sum::<f64>() / (insample.len() - s) as f64;
    if scale > 0.0 {
        Ok(scale)
    } else {
        Err(Error::Metric("in-sample series is constant at the seasonal lag".into()))
    }
}

/// Mean absolute error scaled by the in-sample seasonal naive error.
pub fn mase(actuals: &[f64], forecasts: &[f64], insample: &[f64], s: usize) -> Result<f64> {
    same_length(actuals, forecasts)?;
    let scale = seasonal_naive_scale(insample, s)?;
    let mae = actuals.iter().zip(forecasts).map(|(y, f)| (y - f).abs()).sum::<f64>() / actuals.len() as f64;
    Ok(mae / scale)
}

/// Central prediction interval at significance `alpha` (nominal coverage
/// `1 - alpha`).
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalForecast {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub alpha: f64,
}

impl IntervalForecast {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, alpha: f64) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Metric("interval bounds differ in length".into()));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Metric(format!("significance {alpha} outside (0, 1)")));
        }
        if let Some(k) = lower.iter().zip(&upper).position(|(l, u)| !(l <= u)) {
            return Err(Error::Metric(format!("lower bound above upper bound at step {}", k + 1)));
        }
        Ok(Self { lower, upper, alpha })
    }
}

/// Mean scaled interval score: mean over steps of the width plus
/// `2 / alpha` times any miss, divided by the seasonal naive scale.
pub fn msis(actuals: &[f64], interval: &IntervalForecast, insample: &[f64], s: usize) -> Result<f64> {
    same_length(actuals, &interval.lower)?;
    let scale = seasonal_naive_scale(insample, s)?;
    let penalty = 2.0 / interval.alpha;
    let total: f64 = actuals
        .iter()
        .zip(interval.lower.iter().zip(&interval.upper))
        .map(|(&y, (&l, &u))| (u - l) + penalty * ((l - y).max(0.0) + (y - u).max(0.0)))
        .sum();
    Ok(total / actuals.len() as f64 / scale)
}

/// Fractions of steps whose actual lies strictly below the 99th, 95th, 5th
/// and 1st percentile tracks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Coverage {
    pub below_p99: f64,
    pub below_p95: f64,
    pub below_p5: f64,
    pub below_p1: f64,
}

/// Quantile tracks needed for coverage statistics, one value per step.
#[derive(Debug, Clone, Copy)]
pub struct CoverageTracks<'a> {
    pub p1: &'a [f64],
    pub p5: &'a [f64],
    pub p95: &'a [f64],
    pub p99: &'a [f64],
}

/// Counts of steps below each track, in the order p99, p95, p5, p1.
pub fn coverage_counts(actuals: &[f64], tracks: CoverageTracks) -> Result<[usize; 4]> {
    for t in [tracks.p1, tracks.p5, tracks.p95, tracks.p99] {
        if t.len() != actuals.len() {
            return Err(Error::Metric("quantile track length differs from actuals".into()));
        }
    }
    let below = |track: &[f64]| actuals.iter().zip(track).filter(|(y, q)| y < q).count();
    Ok([below(tracks.p99), below(tracks.p95), below(tracks.p5), below(tracks.p1)])
}

pub fn coverage_stats(actuals: &[f64], tracks: CoverageTracks) -> Result<Coverage> {
    let c = coverage_counts(actuals, tracks)?;
    Ok(Coverage::from_counts(c, actuals.len()))
}

impl Coverage {
    pub fn from_counts(counts: [usize; 4], total: usize) -> Self {
        let f = |c: usize| if total == 0 { 0.0 } else { c as f64 / total as f64 };
        Self {
            below_p99: f(counts[0]),
            below_p95: f(counts[1]),
            below_p5: f(counts[2]),
            below_p1: f(counts[3]),
        }
    }
}
