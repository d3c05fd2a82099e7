use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lgt_core::eval::{Backend, ModelChoice};

#[derive(Debug, Parser)]
#[command(
    name = "lgt",
    version,
    about = "Fit, forecast and evaluate LGT/SGT exponential smoothing models",
    after_help = "Settings are resolved as: flags, then LGT_SEED (seed only), then the --config file, then defaults.\n\
                  Exit codes: 2 usage, 3 input/output, 4 invalid data or settings, 5 model or sampler failure."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample posteriors (or fit ETS baselines) and write draws.csv and diagnostics.csv.
    Fit(FitArgs),
    /// Forecast every series over its horizon and write forecasts.csv.
    Forecast(ForecastArgs),
    /// Hold out each horizon, forecast, score, and write report.csv, failures.csv and summary.txt.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub common: Common,
    /// Draws file written by `fit`; skips sampling. Use the same input, seed and model as the fit.
    #[arg(long, value_name = "FILE")]
    pub draws: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also write per-series wall-clock seconds to timings.csv.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Dataset CSV: id,category,frequency,horizon,v1,v2,...
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Directory for output files; created if missing.
    #[arg(long, value_name = "DIR")]
    pub output_dir: PathBuf,
    /// Model: auto (lgt if non-seasonal, else sgt), lgt, sgt, ets-aadn or ets-hw.
    #[arg(long, value_parser = parse_model)]
    pub model: Option<ModelChoice>,
    /// MCMC backend: mwg or gibbs (gibbs supports non-seasonal models only).
    #[arg(long, value_parser = parse_backend)]
    pub backend: Option<Backend>,
    /// Number of chains.
    #[arg(long)]
    pub chains: Option<usize>,
    /// Iterations per chain, burn-in included.
    #[arg(long)]
    pub iters: Option<usize>,
    /// Burn-in iterations per chain.
    #[arg(long)]
    pub burn: Option<usize>,
    /// Keep every n-th iteration after burn-in.
    #[arg(long)]
    pub thin: Option<usize>,
    /// Simulated paths per forecast.
    #[arg(long)]
    pub paths: Option<usize>,
    /// Master seed; series i uses the stream (seed, i).
    #[arg(long, env = "LGT_SEED")]
    pub seed: Option<u64>,
    /// Worker threads; output does not depend on this.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Settings file of `key = value` lines.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Comma-separated quantile levels in (0, 1); must include 0.5.
    #[arg(long, value_name = "LEVELS")]
    pub quantiles: Option<String>,
}

fn parse_model(s: &str) -> Result<ModelChoice, String> {
    s.parse().map_err(|e: lgt_core::Error| e.to_string())
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse().map_err(|e: lgt_core::Error| e.to_string())
}
