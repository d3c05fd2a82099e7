//! Accuracy metrics, the forecaster front end and batch evaluation over a
//! dataset with held-out horizons.

mod forecaster;
mod metrics;

pub use forecaster::{
    Backend, Fit, Fitted, ForecastConfig, Forecaster, ModelChoice, ModelForecaster, FIT_STREAM,
    SIMULATE_STREAM,
};
pub use metrics::{
    coverage_counts, coverage_stats, mase, msis, seasonal_naive_scale, smape, Coverage, CoverageTracks,
    IntervalForecast,
};

use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forecast::ForecastDistribution;
use crate::rand_dist::RngState;
use crate::series::{split_last_h, TimeSeries};

/// Metrics of one successfully forecast series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMetrics {
    pub id: String,
    pub category: String,
    /// Model actually used, after routing.
    pub model: String,
    pub horizon: usize,
    pub smape: f64,
    pub mase: f64,
    /// MSIS of the p5-p95 interval.
    pub msis90: f64,
    /// MSIS of the p1-p99 interval.
    pub msis98: f64,
    /// Steps with the actual below the p99, p95, p5 and p1 tracks.
    pub below: [usize; 4],
    pub point_forecast: Vec<f64>,
    /// Wall-clock seconds for fitting and forecasting.
    pub seconds: f64,
}

impl SeriesMetrics {
    pub fn coverage(&self) -> Coverage {
        Coverage::from_counts(self.below, self.horizon)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFailure {
    pub id: String,
    pub category: String,
    pub message: String,
}

/// Unweighted means of per-series metrics over a group of series; coverage
/// pools all (series, step) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CategorySummary {
    pub category: String,
    pub n_series: usize,
    pub smape: f64,
    pub mase: f64,
    pub msis90: f64,
    pub msis98: f64,
    pub coverage: Coverage,
    pub seconds: f64,
}

impl CategorySummary {
    fn over<'a>(category: &str, rows: impl Iterator<Item = &'a SeriesMetrics>) -> Self {
        let rows: Vec<&SeriesMetrics> = rows.collect();
        let n = rows.len();
        let mean = |f: fn(&SeriesMetrics) -> f64| {
            if n == 0 {
                f64::NAN
            } else {
                rows.iter().map(|r| f(r)).sum::<f64>() / n as f64
            }
        };
        let mut counts = [0usize; 4];
        let mut steps = 0;
        for r in &rows {
            for (c, b) in counts.iter_mut().zip(r.below) {
                *c += b;
            }
            steps += r.horizon;
        }
        Self {
            category: category.to_string(),
            n_series: n,
            smape: mean(|r| r.smape),
            mase: mean(|r| r.mase),
            msis90: mean(|r| r.msis90),
            msis98: mean(|r| r.msis98),
            coverage: Coverage::from_counts(counts, steps),
            seconds: rows.iter().map(|r| r.seconds).sum(),
        }
    }
}

/// Per-series results in dataset order with per-category and overall
/// aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub series: Vec<SeriesMetrics>,
    pub failures: Vec<SeriesFailure>,
    /// In order of first appearance in the dataset.
    pub categories: Vec<CategorySummary>,
    pub overall: CategorySummary,
}

pub const REPORT_HEADER: [&str; 12] = [
    "id", "category", "model", "horizon", "smape", "mase", "msis90", "msis98", "below_p99", "below_p95",
    "below_p5", "below_p1",
];

impl MetricReport {
    pub fn from_outcomes(outcomes: Vec<std::result::Result<SeriesMetrics, SeriesFailure>>) -> Self {
        let mut series = Vec::new();
        let mut failures = Vec::new();
        for o in outcomes {
            match o {
                Ok(m) => series.push(m),
                Err(f) => failures.push(f),
            }
        }
        let mut names: Vec<&str> = Vec::new();
        for m in &series {
            if !names.contains(&m.category.as_str()) {
                names.push(&m.category);
            }
        }
        let categories = names
            .iter()
            .map(|c| CategorySummary::over(c, series.iter().filter(|m| m.category == *c)))
            .collect();
        let overall = CategorySummary::over("all", series.iter());
        Self { series, failures, categories, overall }
    }

    /// Per-series metrics CSV. Runtimes are left out so that reports are
    /// reproducible; see [`MetricReport::write_timings`].
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::InvalidArgument(format!("writing report: {e}"));
        w.write_record(REPORT_HEADER).map_err(err)?;
        for m in &self.series {
            let c = m.coverage();
            let row = [
                m.id.clone(),
                m.category.clone(),
                m.model.clone(),
                m.horizon.to_string(),
                m.smape.to_string(),
                m.mase.to_string(),
                m.msis90.to_string(),
                m.msis98.to_string(),
                c.below_p99.to_string(),
                c.below_p95.to_string(),
                c.below_p5.to_string(),
                c.below_p1.to_string(),
            ];
            w.write_record(&row).map_err(err)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(format!("writing report: {e}")))
    }

    pub fn write_failures<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::InvalidArgument(format!("writing failures: {e}"));
        w.write_record(["id", "category", "error"]).map_err(err)?;
        for f in &self.failures {
            w.write_record([&f.id, &f.category, &f.message]).map_err(err)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(format!("writing failures: {e}")))
    }

    pub fn write_timings<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::InvalidArgument(format!("writing timings: {e}"));
        w.write_record(["id", "seconds"]).map_err(err)?;
        for m in &self.series {
            w.write_record([m.id.clone(), format!("{:.6}", m.seconds)]).map_err(err)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(format!("writing timings: {e}")))
    }

    /// Plain-text table, one row per category plus the overall row.
    /// Coverage columns are percentages.
    pub fn summary_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<12} {:>7} {:>8} {:>7} {:>8} {:>8} {:>7} {:>7} {:>7} {:>7}",
            "category", "series", "sMAPE", "MASE", "MSIS90", "MSIS98", "<99p", "<95p", "<5p", "<1p"
        );
        for c in self.categories.iter().chain(std::iter::once(&self.overall)) {
            let _ = writeln!(
                s,
                "{:<12} {:>7} {:>8.3} {:>7.3} {:>8.3} {:>8.3} {:>7.2} {:>7.2} {:>7.2} {:>7.2}",
                c.category,
                c.n_series,
                c.smape,
                c.mase,
                c.msis90,
                c.msis98,
                100.0 * c.coverage.below_p99,
                100.0 * c.coverage.below_p95,
                100.0 * c.coverage.below_p5,
                100.0 * c.coverage.below_p1,
            );
        }
        let _ = writeln!(s, "failures: {}", self.failures.len());
        s
    }
}

fn score(
    series: &TimeSeries,
    train: &TimeSeries,
    test: &[f64],
    dist: &ForecastDistribution,
) -> Result<(f64, f64, f64, f64, [usize; 4], Vec<f64>)> {
    if dist.horizon() != test.len() {
        return Err(Error::Metric(format!(
            "forecast has {} steps, {} held out",
            dist.horizon(),
            test.len()
        )));
    }
    let m = series.frequency();
    let insample = train.values();
    let point = dist.point_forecast()?;
    let p1 = dist.quantile_track(0.01)?;
    let p5 = dist.quantile_track(0.05)?;
    let p95 = dist.quantile_track(0.95)?;
    let p99 = dist.quantile_track(0.99)?;
    let s = smape(test, &point)?;
    let a = mase(test, &point, insample, m)?;
    let i90 = msis(test, &IntervalForecast::new(p5.clone(), p95.clone(), 0.1)?, insample, m)?;
    let i98 = msis(test, &IntervalForecast::new(p1.clone(), p99.clone(), 0.02)?, insample, m)?;
    let below = coverage_counts(test, CoverageTracks { p1: &p1, p5: &p5, p95: &p95, p99: &p99 })?;
    Ok((s, a, i90, i98, below, point))
}

/// Evaluate one series: hold out its horizon, forecast from the prefix and
/// score against the held-out values.
pub fn evaluate_series(
    series: &TimeSeries,
    forecaster: &dyn Forecaster,
    rng: &mut RngState,
) -> std::result::Result<SeriesMetrics, SeriesFailure> {
    let fail = |e: Error| SeriesFailure {
        id: series.id().to_string(),
        category: series.category().to_string(),
        message: e.to_string(),
    };
    let split = split_last_h(series).map_err(fail)?;
    let model = forecaster.route(&split.train).map_err(fail)?;
    let start = Instant::now();
    let dist = forecaster.forecast(&split.train, rng).map_err(fail)?;
    let seconds = start.elapsed().as_secs_f64();
    let (smape, mase, msis90, msis98, below, point_forecast) =
        score(series, &split.train, &split.test, &dist).map_err(fail)?;
    Ok(SeriesMetrics {
        id: series.id().to_string(),
        category: series.category().to_string(),
        model: model.to_string(),
        horizon: split.test.len(),
        smape,
        mase,
        msis90,
        msis98,
        below,
        point_forecast,
        seconds,
    })
}

/// Evaluate every series in parallel on the current rayon pool. Series `i`
/// uses the RNG stream `(seed, i)`, so results do not depend on the number
/// of workers. Failures are collected, never fatal.
pub fn evaluate_dataset(dataset: &[TimeSeries], forecaster: &dyn Forecaster, seed: u64) -> MetricReport {
    let outcomes = dataset
        .par_iter()
        .enumerate()
        .map(|(i, s)| evaluate_series(s, forecaster, &mut RngState::for_stream(seed, i as u64)))
        .collect();
    MetricReport::from_outcomes(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::{aggregate_quantiles, PathMatrix, DEFAULT_LEVELS};
    use std::collections::HashMap;

    /// Returns the held-out truth as a single path.
    struct Oracle(HashMap<String, Vec<f64>>);

    impl Forecaster for Oracle {
        fn route(&self, _: &TimeSeries) -> Result<&'static str> {
            Ok("oracle")
        }

        fn forecast(&self, series: &TimeSeries, _: &mut RngState) -> Result<ForecastDistribution> {
            let truth = &self.0[series.id()];
            aggregate_quantiles(&PathMatrix::from_rows(std::slice::from_ref(truth))?, &DEFAULT_LEVELS)
        }
    }

    /// Always forecasts a constant.
    struct Constant(f64);

    impl Forecaster for Constant {
        fn route(&self, _: &TimeSeries) -> Result<&'static str> {
            Ok("constant")
        }

        fn forecast(&self, series: &TimeSeries, _: &mut RngState) -> Result<ForecastDistribution> {
            let row = vec![self.0; series.horizon()];
            aggregate_quantiles(&PathMatrix::from_rows(&[row])?, &DEFAULT_LEVELS)
        }
    }

    fn series(id: &str, category: &str, values: Vec<f64>, m: usize, h: usize) -> TimeSeries {
        TimeSeries::new(id, category, values, m, h).unwrap()
    }

    #[test]
    fn oracle_scores_zero() {
        let s = series("a", "yearly", vec![1.0, 3.0, 2.0, 5.0, 4.0, 6.0], 1, 2);
        let oracle = Oracle(HashMap::from([("a".to_string(), vec![4.0, 6.0])]));
        let report = evaluate_dataset(&[s], &oracle, 1);
        assert!(report.failures.is_empty());
        let m = &report.series[0];
        assert_eq!((m.smape, m.mase, m.msis90, m.msis98), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(m.model, "oracle");
        assert_eq!(report.overall.smape, 0.0);
    }

    #[test]
    fn unweighted_means_and_failures() {
        // Constant 1 against actuals chosen for sMAPE 10 and 20 on one step.
        let y10 = 21.0 / 19.0;
        let y20 = 11.0 / 9.0;
        let data = [
            series("a", "yearly", vec![1.0, 2.0, 3.0, 4.0, y10], 1, 1),
            series("b", "other", vec![1.0, 2.0, 3.0, 4.0, y20], 1, 1),
            series("c", "other", vec![1.0, 1.0, 1.0, 1.0, 1.0], 1, 1),
        ];
        let report = evaluate_dataset(&data, &Constant(1.0), 0);
        assert_eq!(report.series.len(), 2);
        assert!((report.series[0].smape - 10.0).abs() < 1e-9);
        assert!((report.series[1].smape - 20.0).abs() < 1e-9);
        assert!((report.overall.smape - 15.0).abs() < 1e-9);
        assert_eq!(report.failures.len(), 1);
        assert_eq!(report.failures[0].id, "c");
        assert_eq!(report.categories.len(), 2);
        assert_eq!(report.categories[0].category, "yearly");
        assert!(report.summary_table().contains("failures: 1"));
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("id,category,model"));
    }

    #[test]
    fn routing_is_recorded() {
        let cfg = ForecastConfig {
            sampler: crate::sampler::SamplerConfig { n_chains: 1, n_iter: 60, n_burn: 30, thin: 1, ..Default::default() },
            n_paths: 200,
            ..Default::default()
        };
        let yearly: Vec<f64> = (0..14).map(|t| 10.0 + t as f64 + (t % 3) as f64).collect();
        let monthly: Vec<f64> = (0..30).map(|t| 50.0 + (t as f64 * 0.5).sin() * 5.0 + t as f64).collect();
        let data = [series("y", "yearly", yearly, 1, 3), series("m", "monthly", monthly, 12, 3)];
        let report = evaluate_dataset(&data, &cfg.forecaster(ModelChoice::Auto), 4);
        assert!(report.failures.is_empty(), "{:?}", report.failures);
        let routed: Vec<(&str, &str)> = report.series.iter().map(|m| (m.id.as_str(), m.model.as_str())).collect();
        assert_eq!(routed, vec![("y", "lgt"), ("m", "sgt")]);
    }

    #[test]
    fn coverage_fractions_are_bounded_and_ordered() {
        let s = series("a", "yearly", (1..=12).map(f64::from).collect(), 1, 4);
        let report = evaluate_dataset(&[s], &Constant(9.5), 0);
        let c = report.overall.coverage;
        for f in [c.below_p99, c.below_p95, c.below_p5, c.below_p1] {
            assert!((0.0..=1.0).contains(&f));
        }
        assert!(c.below_p1 <= c.below_p5 && c.below_p5 <= c.below_p95 && c.below_p95 <= c.below_p99);
    }
}
