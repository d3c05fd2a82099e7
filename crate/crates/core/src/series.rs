//! Time-series value types and train/test bookkeeping.

use crate::error::{Error, Result};

/// Minimum number of observations a series must carry.
pub const MIN_LENGTH: usize = 4;

/// A univariate series with its seasonal period and forecast horizon.
///
/// Values are stored in natural units; construction checks finiteness and
/// length rules but not positivity, which only matters once a model is fitted
/// (see [`PositiveShift`]).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    id: String,
    category: String,
    values: Vec<f64>,
    frequency: usize,
    horizon: usize,
}

impl TimeSeries {
    pub fn new(
        id: impl Into<String>,
        category: impl Into<String>,
        values: Vec<f64>,
        frequency: usize,
        horizon: usize,
    ) -> Result<Self> {
        let id = id.into();
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { id, index });
        }
        let invalid = |msg: String| Error::InvalidSeries {
            id: id.clone(),
            msg,
        };
        if frequency == 0 {
            return Err(invalid("frequency must be at least 1".into()));
        }
        if horizon == 0 {
            return Err(invalid("horizon must be at least 1".into()));
        }
        if values.len() < MIN_LENGTH {
            return Err(invalid(format!(
                "needs at least {MIN_LENGTH} values, got {}",
                values.len()
            )));
        }
        if frequency > 1 && values.len() < 2 * frequency {
            return Err(invalid(format!(
                "seasonal period {frequency} needs at least {} values, got {}",
                2 * frequency,
                values.len()
            )));
        }
        Ok(Self {
            id,
            category: category.into(),
            values,
            frequency,
            horizon,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn category(&self) -> &str {
        &self.category
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Seasonal period `m`; 1 for non-seasonal series.
    pub fn frequency(&self) -> usize {
        self.frequency
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn is_seasonal(&self) -> bool {
        self.frequency > 1
    }

    /// Copy of this series with the values replaced, keeping all metadata.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(
            self.id.clone(),
            self.category.clone(),
            values,
            self.frequency,
            self.horizon,
        )
    }
}

/// A series split into a training prefix and the held-out final `h` values.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainTestSplit {
    pub train: TimeSeries,
    pub test: Vec<f64>,
}

/// Hold out the last `horizon` observations.
pub fn split_last_h(series: &TimeSeries) -> Result<TrainTestSplit> {
    let n = series.len();
    let h = series.horizon();
    if n <= h {
        return Err(Error::InvalidSeries {
            id: series.id().to_string(),
            msg: format!("cannot hold out {h} of {n} values"),
        });
    }
    let (head, tail) = series.values().split_at(n - h);
    // The prefix may be shorter than MIN_LENGTH; models check their own
    // minimum lengths when fitting.
    let train = TimeSeries {
        values: head.to_vec(),
        ..series.clone()
    };
    Ok(TrainTestSplit {
        train,
        test: tail.to_vec(),
    })
}

/// Additive shift that makes a series strictly positive before fitting.
///
/// For a series whose minimum is `<= 0` the offset is `1 - min(y)`; otherwise
/// it is zero and the shift is a no-op.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositiveShift {
    offset: f64,
}

impl PositiveShift {
    pub fn for_values(values: &[f64]) -> Self {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let offset = if min <= 0.0 { 1.0 - min } else { 0.0 };
        Self { offset }
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn is_identity(&self) -> bool {
        self.offset == 0.0
    }

    pub fn apply(&self, series: &TimeSeries) -> Result<TimeSeries> {
        if self.is_identity() {
            return Ok(series.clone());
        }
        Ok(TimeSeries {
            values: series.values.iter().map(|v| v + self.offset).collect(),
            ..series.clone()
        })
    }

    pub fn undo(&self, value: f64) -> f64 {
        value - self.offset
    }
}
