//! Bayesian exponential smoothing with a global power-law trend.
//!
//! The crate provides the LGT (non-seasonal, local and global trend) and SGT
//! (multiplicative seasonal, global trend) models with Student-t,
//! heteroscedastic errors, two MCMC backends to fit them, classical AAdN and
//! Holt-Winters baselines fitted by maximum likelihood, posterior-predictive
//! forecast simulation and an M3-style evaluation harness.
//!
//! Typical use:
//!
//! ```no_run
//! use lgt_core::eval::{ForecastConfig, ModelChoice, Forecaster};
//! use lgt_core::rand_dist::RngState;
//! use lgt_core::series::TimeSeries;
//!
//! let series = TimeSeries::new("demo", "yearly", vec![10.0, 12.0, 15.0, 17.0, 21.0, 24.0], 1, 3)?;
//! let forecaster = ForecastConfig::default().forecaster(ModelChoice::Auto);
//! let mut rng = RngState::from_seed(7);
//! let dist = forecaster.forecast(&series, &mut rng)?;
//! println!("{:?}", dist.point_forecast()?);
//! # Ok::<(), lgt_core::Error>(())
//! ```

pub mod config;
pub mod error;
pub mod ets;
pub mod eval;
pub mod forecast;
pub mod io;
pub mod model;
pub mod rand_dist;
pub mod sampler;
pub mod series;

pub use error::{Error, Result};
