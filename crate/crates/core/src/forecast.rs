//! Posterior-predictive simulation and quantile summaries.

use rand::RngCore;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::Model;
use crate::rand_dist::RngState;

/// Quantile levels reported by default; the median doubles as the point
/// forecast.
pub const DEFAULT_LEVELS: [f64; 5] = [0.01, 0.05, 0.5, 0.95, 0.99];

pub const DEFAULT_PATHS: usize = 5000;

/// Paths simulated per RNG stream. Fixed so output does not depend on the
/// number of worker threads.
const BLOCK: usize = 250;

/// Row-major `n_paths x h` matrix of simulated values.
#[derive(Debug, Clone, PartialEq)]
pub struct PathMatrix {
    n_paths: usize,
    horizon: usize,
    data: Vec<f64>,
}

impl PathMatrix {
    pub fn zeros(n_paths: usize, horizon: usize) -> Self {
        Self {
            n_paths,
            horizon,
            data: vec![0.0; n_paths * horizon],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let horizon = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != horizon) {
            return Err(Error::InvalidArgument("ragged path rows".into()));
        }
        Ok(Self {
            n_paths: rows.len(),
            horizon,
            data: rows.concat(),
        })
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn row(&self, path: usize) -> &[f64] {
        &self.data[path * self.horizon..(path + 1) * self.horizon]
    }

    pub fn row_mut(&mut self, path: usize) -> &mut [f64] {
        &mut self.data[path * self.horizon..(path + 1) * self.horizon]
    }

    pub fn column(&self, step: usize) -> Vec<f64> {
        (0..self.n_paths).map(|p| self.data[p * self.horizon + step]).collect()
    }
}

/// Simulate `n_paths` future paths of length `h`, one posterior draw per
/// path, cycling through `draws` in order.
///
/// Paths are generated in fixed-size blocks, each with its own RNG stream
/// split from `rng`, and blocks run in parallel.
pub fn simulate_paths<M: Model>(
    model: &M,
    draws: &[M::Params],
    h: usize,
    n_paths: usize,
    rng: &mut RngState,
) -> Result<PathMatrix> {
    if draws.is_empty() {
        return Err(Error::InvalidArgument("no posterior draws to simulate from".into()));
    }
    if n_paths == 0 || h == 0 {
        return Err(Error::InvalidArgument("need at least one path and one step".into()));
    }
    let used = draws.len().min(n_paths);
    let states = draws[..used]
        .par_iter()
        .map(|p| model.final_state(p))
        .collect::<Result<Vec<_>>>()?;

    let base = rng.next_u64();
    let mut paths = PathMatrix::zeros(n_paths, h);
    paths
        .data
        .par_chunks_mut(BLOCK * h)
        .enumerate()
        .try_for_each(|(block, chunk)| {
            let mut stream = RngState::for_stream(base, block as u64);
            for (offset, row) in chunk.chunks_mut(h).enumerate() {
                let k = (block * BLOCK + offset) % used;
                model.simulate_path(&draws[k], &states[k], &mut stream, row)?;
            }
            Ok::<_, Error>(())
        })?;
    Ok(paths)
}

/// Per-step quantiles and means of a set of simulated paths.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastDistribution {
    pub levels: Vec<f64>,
    /// `quantiles[k][j]` is the quantile at `levels[j]` for step `k + 1`.
    pub quantiles: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub n_paths: usize,
}

impl ForecastDistribution {
    pub fn horizon(&self) -> usize {
        self.mean.len()
    }

    /// Values at one quantile level across the horizon.
    pub fn quantile_track(&self, level: f64) -> Result<Vec<f64>> {
        let j = self
            .levels
            .iter()
            .position(|&l| (l - level).abs() < 1e-9)
            .ok_or_else(|| Error::InvalidArgument(format!("quantile level {level} not computed")))?;
        Ok(self.quantiles.iter().map(|q| q[j]).collect())
    }

    /// Median track.
    pub fn point_forecast(&self) -> Result<Vec<f64>> {
        self.quantile_track(0.5)
    }

    /// Subtract a constant from every value, undoing a positivity shift.
    pub fn shifted_down(mut self, offset: f64) -> Self {
        if offset != 0.0 {
            for v in self.quantiles.iter_mut().flatten().chain(self.mean.iter_mut()) {
                *v -= offset;
            }
        }
        self
    }
}

/// Linear-interpolation quantile of sorted data (Hyndman and Fan type 7).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

/// Summarize paths by type-7 quantiles at `levels` and per-step means.
pub fn aggregate_quantiles(paths: &PathMatrix, levels: &[f64]) -> Result<ForecastDistribution> {
    if paths.n_paths == 0 || paths.horizon == 0 {
        return Err(Error::InvalidArgument("empty path matrix".into()));
    }
    validate_levels(levels)?;
    let mut quantiles = Vec::with_capacity(paths.horizon);
    let mut mean = Vec::with_capacity(paths.horizon);
    for step in 0..paths.horizon {
        let mut col = paths.column(step);
        if col.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument(format!("NaN in simulated paths at step {}", step + 1)));
        }
        mean.push(col.iter().sum::<f64>() / col.len() as f64);
        col.sort_by(f64::total_cmp);
        quantiles.push(levels.iter().map(|&p| quantile_sorted(&col, p)).collect());
    }
    Ok(ForecastDistribution {
        levels: levels.to_vec(),
        quantiles,
        mean,
        n_paths: paths.n_paths,
    })
}

fn validate_levels(levels: &[f64]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::InvalidArgument("no quantile levels".into()));
    }
    if levels.iter().any(|&l| !(l > 0.0 && l < 1.0)) {
        return Err(Error::InvalidArgument("quantile levels must lie in (0, 1)".into()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("quantile levels must be strictly increasing".into()));
    }
    Ok(())
}

/// Parse a comma-separated list of quantile levels such as
/// `0.01,0.05,0.5,0.95,0.99`. The median must be present.
pub fn parse_quantiles(text: &str) -> Result<Vec<f64>> {
    let mut levels = text
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad quantile level {tok:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    levels.sort_by(f64::total_cmp);
    validate_levels(&levels)?;
    if !levels.iter().any(|&l| (l - 0.5).abs() < 1e-9) {
        return Err(Error::InvalidArgument("quantile levels must include 0.5".into()));
    }
    Ok(levels)
}

/// Column label for a level: `0.05 -> "p5"`, `0.975 -> "p97.5"`.
pub fn level_label(level: f64) -> String {
    let pct = (level * 1e6).round() / 1e4;
    format!("p{pct}")
}
