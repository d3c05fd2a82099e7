//! The `lgt` command line: `fit`, `forecast` and `evaluate` over a dataset CSV.

pub mod args;
pub mod settings;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use rayon::prelude::*;

use lgt_core::eval::{evaluate_dataset, ModelForecaster, FIT_STREAM, SIMULATE_STREAM};
use lgt_core::forecast::{ForecastDistribution, DEFAULT_LEVELS};
use lgt_core::io::{load_dataset, parse_draws, read_to_string, write_draws, write_forecasts, DrawRow};
use lgt_core::rand_dist::RngState;
use lgt_core::series::TimeSeries;
use lgt_core::Error;

use args::{Cli, Command, Common, EvaluateArgs, FitArgs, ForecastArgs};
use settings::Settings;

/// Process exit status classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Usage = 2,
    Io = 3,
    Validation = 4,
    Model = 5,
}

impl ExitKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Usage => "usage",
            Self::Io => "io",
            Self::Validation => "validation",
            Self::Model => "model",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl fmt::Display for CliError {
    /// `error[<kind>]: <message>` on a single line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_line: String = self.message.split_whitespace().collect::<Vec<_>>().join(" ");
        write!(f, "error[{}]: {}", self.kind.label(), one_line)
    }
}

fn kind_of(e: &Error) -> ExitKind {
    match e {
        Error::Io { .. } => ExitKind::Io,
        Error::Parse { .. }
        | Error::NonFinite { .. }
        | Error::InvalidSeries { .. }
        | Error::InvalidParameter { .. }
        | Error::InvalidArgument(_)
        | Error::Config { .. } => ExitKind::Validation,
        Error::NonFiniteRecursion { .. } | Error::Metric(_) | Error::Sampler(_) | Error::NoConvergence { .. } => {
            ExitKind::Model
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self { kind: kind_of(&e), message: e.to_string() }
    }
}

/// Attach the series id unless the message already names it.
fn for_series(series: &TimeSeries, e: Error) -> CliError {
    let kind = kind_of(&e);
    let message = match e {
        Error::InvalidSeries { .. } | Error::NonFinite { .. } => e.to_string(),
        other => format!("series {}: {other}", series.id()),
    };
    CliError { kind, message }
}

/// Parse `argv` (program name first), run the command and return the exit
/// status. Errors are printed to stderr as one line.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let err = CliError {
                kind: ExitKind::Usage,
                message: first.trim_start_matches("error: ").to_string(),
            };
            eprintln!("{err}");
            return ExitKind::Usage as i32;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.kind as i32
        }
    }
}

fn common(command: &Command) -> &Common {
    match command {
        Command::Fit(a) => &a.common,
        Command::Forecast(a) => &a.common,
        Command::Evaluate(a) => &a.common,
    }
}

/// Run a command on a pool bounded by `--jobs`.
pub fn execute(command: &Command) -> Result<(), CliError> {
    let settings = Settings::resolve(common(command))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = settings.jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError {
        kind: ExitKind::Validation,
        message: format!("cannot start {} workers: {e}", settings.jobs.unwrap_or(0)),
    })?;
    pool.install(|| match command {
        Command::Fit(a) => fit(a, &settings),
        Command::Forecast(a) => forecast(a, &settings),
        Command::Evaluate(a) => evaluate(a, &settings),
    })
}

fn load(common: &Common) -> Result<Vec<TimeSeries>, CliError> {
    let data = load_dataset(&common.input)?;
    if data.is_empty() {
        return Err(CliError {
            kind: ExitKind::Validation,
            message: format!("{}: no series", common.input.display()),
        });
    }
    Ok(data)
}

/// Write every file or none: each is staged in a temporary file in the
/// output directory and renamed into place once all are staged.
fn write_outputs(dir: &Path, files: Vec<(&str, Vec<u8>)>) -> Result<(), CliError> {
    let io = |path: &Path, e: std::io::Error| CliError::from(Error::io(path, e));
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io(dir, e))?;
        tmp.write_all(&bytes).and_then(|_| tmp.as_file().sync_all()).map_err(|e| io(tmp.path(), e))?;
        staged.push((dir.join(name), tmp));
    }
    for (path, tmp) in staged {
        tmp.persist(&path).map_err(|e| io(&path, e.error))?;
    }
    Ok(())
}

fn forecaster(settings: &Settings) -> ModelForecaster {
    settings.forecast.clone().forecaster(settings.model)
}

fn fit(args: &FitArgs, settings: &Settings) -> Result<(), CliError> {
    let data = load(&args.common)?;
    let f = forecaster(settings);
    let fits = data
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let rng = RngState::for_stream(settings.seed, i as u64);
            f.fit(s, &mut rng.split(FIT_STREAM)).map_err(|e| for_series(s, e))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let rows: Vec<DrawRow> = fits.iter().flat_map(|fit| fit.draw_rows()).collect();
    let mut draws = Vec::new();
    write_draws(&mut draws, &rows)?;

    let mut diag = String::from("id,model,parameter,mean,sd,rhat,ess\n");
    for fit in &fits {
        match fit.summaries() {
            Some(Ok(summaries)) => {
                for p in summaries {
                    diag.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        fit.id,
                        fit.model.name(),
                        p.name,
                        p.mean,
                        p.sd,
                        p.rhat,
                        p.ess
                    ));
                }
            }
            Some(Err(e)) => eprintln!("warning: series {}: no diagnostics: {e}", fit.id),
            None => {}
        }
    }
    write_outputs(
        &args.common.output_dir,
        vec![("draws.csv", draws), ("diagnostics.csv", diag.into_bytes())],
    )
}

fn forecast(args: &ForecastArgs, settings: &Settings) -> Result<(), CliError> {
    let data = load(&args.common)?;
    let f = forecaster(settings);
    let rows = match &args.draws {
        Some(path) => Some(parse_draws(&read_to_string(path)?)?),
        None => None,
    };
    let dists = data
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let rng = RngState::for_stream(settings.seed, i as u64);
            let fit = match &rows {
                Some(rows) => f.fit_from_rows(s, rows),
                None => f.fit(s, &mut rng.split(FIT_STREAM)),
            }
            .map_err(|e| for_series(s, e))?;
            let dist = f
                .simulate(&fit, s.horizon(), &mut rng.split(SIMULATE_STREAM))
                .map_err(|e| for_series(s, e))?;
            Ok((s.id().to_string(), dist))
        })
        .collect::<Result<Vec<(String, ForecastDistribution)>, CliError>>()?;
    let mut out = Vec::new();
    write_forecasts(&mut out, &dists)?;
    write_outputs(&args.common.output_dir, vec![("forecasts.csv", out)])
}

fn evaluate(args: &EvaluateArgs, settings: &Settings) -> Result<(), CliError> {
    let data = load(&args.common)?;
    let mut settings = settings.clone();
    // Scoring needs the 1st, 5th, 50th, 95th and 99th percentiles.
    let levels = &mut settings.forecast.levels;
    for l in DEFAULT_LEVELS {
        if !levels.iter().any(|&x| (x - l).abs() < 1e-9) {
            levels.push(l);
        }
    }
    levels.sort_by(f64::total_cmp);
    let f = forecaster(&settings);
    let report = evaluate_dataset(&data, &f, settings.seed);

    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    let mut failures = Vec::new();
    report.write_failures(&mut failures)?;
    let mut files = vec![
        ("report.csv", csv),
        ("failures.csv", failures),
        ("summary.txt", report.summary_table().into_bytes()),
    ];
    if args.timings {
        let mut t = Vec::new();
        report.write_timings(&mut t)?;
        files.push(("timings.csv", t));
    }
    write_outputs(&args.common.output_dir, files)?;
    print!("{}", report.summary_table());
    Ok(())
}
