//! CSV formats: the wide dataset layout, forecast tables and posterior draw
//! files.
//!
//! Dataset rows are `id,category,frequency,horizon,v1,v2,...` with ragged
//! tails. Draw rows are `id,model,chain,iteration,x1,x2,...`, values in the
//! flat order of the named model.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::forecast::{level_label, ForecastDistribution};
use crate::series::TimeSeries;

pub const DATASET_HEADER: [&str; 4] = ["id", "category", "frequency", "horizon"];
pub const DRAWS_HEADER: [&str; 4] = ["id", "model", "chain", "iteration"];

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn csv_error(e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse { row, msg: e.to_string() }
}

/// Checks a header row against its fixed leading columns; `None` for an
/// empty file.
fn read_header(
    records: &mut csv::StringRecordsIter<'_, &[u8]>,
    expected: &[&str],
) -> Result<Option<()>> {
    let Some(header) = records.next() else {
        return Ok(None);
    };
    let header = header.map_err(csv_error)?;
    let found: Vec<&str> = header.iter().take(expected.len()).collect();
    if found.len() < expected.len() || found.iter().zip(expected).any(|(a, b)| !a.eq_ignore_ascii_case(b)) {
        return Err(Error::Parse {
            row: 1,
            msg: format!("header must start with {}", expected.join(",")),
        });
    }
    Ok(Some(()))
}

fn parse_count(field: &str, name: &str, row: usize) -> Result<usize> {
    field
        .parse::<usize>()
        .map_err(|_| Error::Parse { row, msg: format!("{name} {field:?} is not a non-negative integer") })
}

/// Numeric cells of a ragged tail; trailing empty cells are padding.
fn parse_values(fields: csv::StringRecordIter<'_>, row: usize) -> Result<Vec<f64>> {
    let cells: Vec<&str> = fields.collect();
    let used = cells.iter().rposition(|c| !c.is_empty()).map_or(0, |i| i + 1);
    cells[..used]
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if c.is_empty() {
                return Err(Error::Parse { row, msg: format!("empty value in column {}", i + 5) });
            }
            c.parse::<f64>()
                .map_err(|_| Error::Parse { row, msg: format!("value {c:?} is not a number") })
        })
        .collect()
}

/// Parse the wide dataset layout. Rows keep their input order; an empty
/// input yields no series.
pub fn parse_dataset(text: &str) -> Result<Vec<TimeSeries>> {
    let mut rdr = reader(text);
    let mut records = rdr.records();
    if read_header(&mut records, &DATASET_HEADER)?.is_none() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for record in records {
        let record = record.map_err(csv_error)?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() < 4 {
            return Err(Error::Parse { row, msg: "expected id,category,frequency,horizon".into() });
        }
        let id = &record[0];
        if id.is_empty() {
            return Err(Error::Parse { row, msg: "empty series id".into() });
        }
        let frequency = parse_count(&record[2], "frequency", row)?;
        let horizon = parse_count(&record[3], "horizon", row)?;
        let mut fields = record.iter();
        fields.nth(3);
        let values = parse_values(fields, row)?;
        out.push(TimeSeries::new(id, &record[1], values, frequency, horizon)?);
    }
    Ok(out)
}

pub fn read_to_string(path: &Path) -> Result<String> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    Ok(text)
}

pub fn load_dataset(path: &Path) -> Result<Vec<TimeSeries>> {
    parse_dataset(&read_to_string(path)?)
}

/// Write series in the wide layout. Values use the shortest representation
/// that reads back to the same `f64`.
pub fn write_dataset<W: Write>(out: W, series: &[TimeSeries]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("writing dataset: {e}"));
    w.write_record(DATASET_HEADER).map_err(io)?;
    for s in series {
        let mut row = vec![
            s.id().to_string(),
            s.category().to_string(),
            s.frequency().to_string(),
            s.horizon().to_string(),
        ];
        row.extend(s.values().iter().map(f64::to_string));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("writing dataset: {e}")))
}

/// Forecast table: one row per series and step, quantile columns labelled
/// `p1`, `p5`, ... in level order, then the path mean.
pub fn write_forecasts<W: Write>(out: W, forecasts: &[(String, ForecastDistribution)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("writing forecasts: {e}"));
    let levels = forecasts.first().map(|(_, d)| d.levels.clone()).unwrap_or_default();
    let mut header = vec!["id".to_string(), "step".to_string()];
    header.extend(levels.iter().map(|&l| level_label(l)));
    header.push("mean".into());
    w.write_record(&header).map_err(io)?;
    for (id, dist) in forecasts {
        if dist.levels != levels {
            return Err(Error::InvalidArgument("forecasts use different quantile levels".into()));
        }
        for (k, q) in dist.quantiles.iter().enumerate() {
            let mut row = vec![id.clone(), (k + 1).to_string()];
            row.extend(q.iter().map(f64::to_string));
            row.push(dist.mean[k].to_string());
            w.write_record(&row).map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("writing forecasts: {e}")))
}

/// One posterior draw (or point estimate) of one series.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawRow {
    pub id: String,
    pub model: String,
    pub chain: usize,
    pub iteration: usize,
    pub values: Vec<f64>,
}

pub fn write_draws<W: Write>(out: W, rows: &[DrawRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("writing draws: {e}"));
    w.write_record(DRAWS_HEADER.iter().chain(&["values"])).map_err(io)?;
    for r in rows {
        let mut row = vec![r.id.clone(), r.model.clone(), r.chain.to_string(), r.iteration.to_string()];
        row.extend(r.values.iter().map(f64::to_string));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("writing draws: {e}")))
}

/// Parse a draws file written by [`write_draws`]. Values must be finite;
/// their count is checked against the model later.
pub fn parse_draws(text: &str) -> Result<Vec<DrawRow>> {
    let mut rdr = reader(text);
    let mut records = rdr.records();
    if read_header(&mut records, &DRAWS_HEADER)?.is_none() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for record in records {
        let record = record.map_err(csv_error)?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() < 5 {
            return Err(Error::Parse { row, msg: "expected id,model,chain,iteration and values".into() });
        }
        if record[0].is_empty() {
            return Err(Error::Parse { row, msg: "empty series id".into() });
        }
        let mut fields = record.iter();
        fields.nth(3);
        let values = parse_values(fields, row)?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse { row, msg: format!("non-finite value in position {}", i + 1) });
        }
        out.push(DrawRow {
            id: record[0].to_string(),
            model: record[1].to_string(),
            chain: parse_count(&record[2], "chain", row)?,
            iteration: parse_count(&record[3], "iteration", row)?,
            values,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::{aggregate_quantiles, PathMatrix, DEFAULT_LEVELS};
    use proptest::prelude::*;

    const HEADER: &str = "id,category,frequency,horizon\n";

    #[test]
    fn direct_field_mapping() {
        let set = parse_dataset(&format!("{HEADER}Y1,yearly,1,6,100,110,125,130\n")).unwrap();
        assert_eq!(set.len(), 1);
        let s = &set[0];
        assert_eq!((s.id(), s.category(), s.frequency(), s.horizon()), ("Y1", "yearly", 1, 6));
        assert_eq!(s.values(), &[100.0, 110.0, 125.0, 130.0]);
    }

    #[test]
    fn ragged_rows_and_padding() {
        let text = format!("{HEADER}a,q,4,2,1,2,3,4,5,6,7,8,,\nb,o,1,3,5,6,7,8\n");
        let set = parse_dataset(&text).unwrap();
        assert_eq!(set[0].len(), 8);
        assert_eq!(set[1].values(), &[5.0, 6.0, 7.0, 8.0]);
    }

    #[test]
    fn empty_input() {
        assert!(parse_dataset("").unwrap().is_empty());
        assert!(parse_dataset(HEADER).unwrap().is_empty());
    }

    #[test]
    fn nan_names_the_series() {
        let err = parse_dataset(&format!("{HEADER}Y1,yearly,1,6,100,NaN,125,130\n")).unwrap_err();
        assert!(matches!(&err, Error::NonFinite { id, index: 1 } if id == "Y1"), "{err}");
        assert!(err.to_string().contains("Y1"));
    }

    #[test]
    fn malformed_rows_name_the_row() {
        let cases = [
            "a,yearly,1,6,1,2,x,4\n",
            "a,yearly,one,6,1,2,3,4\n",
            "a,yearly,1,6,1,,3,4\n",
            "a,yearly\n",
        ];
        for body in cases {
            let text = format!("{HEADER}ok,yearly,1,2,1,2,3,4\n{body}");
            match parse_dataset(&text) {
                Err(Error::Parse { row: 3, .. }) => {}
                other => panic!("{body:?}: {other:?}"),
            }
        }
        assert!(matches!(parse_dataset("x,y\n1,2\n"), Err(Error::Parse { row: 1, .. })));
    }

    #[test]
    fn series_rules_still_apply() {
        assert!(matches!(
            parse_dataset(&format!("{HEADER}short,yearly,1,2,1,2\n")),
            Err(Error::InvalidSeries { .. })
        ));
    }

    fn arb_series() -> impl Strategy<Value = TimeSeries> {
        (
            "[A-Za-z0-9_]{1,8}",
            prop::sample::select(vec!["yearly", "quarterly", "monthly", "other"]),
            1usize..5,
            1usize..10,
            prop::collection::vec(-1e9f64..1e9, 10..30),
        )
            .prop_map(|(id, cat, m, h, v)| TimeSeries::new(id, cat, v, m, h).unwrap())
    }

    proptest! {
        #[test]
        fn dataset_round_trip(set in prop::collection::vec(arb_series(), 0..6)) {
            let mut buf = Vec::new();
            write_dataset(&mut buf, &set).unwrap();
            let back = parse_dataset(std::str::from_utf8(&buf).unwrap()).unwrap();
            prop_assert_eq!(back, set);
        }

        #[test]
        fn draws_round_trip(values in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 1..15), 0..8)) {
            let rows: Vec<DrawRow> = values
                .into_iter()
                .enumerate()
                .map(|(i, v)| DrawRow { id: format!("s{}", i % 3), model: "lgt".into(), chain: i % 2, iteration: i * 5, values: v })
                .collect();
            let mut buf = Vec::new();
            write_draws(&mut buf, &rows).unwrap();
            prop_assert_eq!(parse_draws(std::str::from_utf8(&buf).unwrap()).unwrap(), rows);
        }
    }

    #[test]
    fn forecast_table_layout() {
        let paths = PathMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let dist = aggregate_quantiles(&paths, &DEFAULT_LEVELS).unwrap();
        let mut buf = Vec::new();
        write_forecasts(&mut buf, &[("N1".into(), dist)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "id,step,p1,p5,p50,p95,p99,mean");
        assert_eq!(lines[1], "N1,1,1.02,1.1,2,2.9,2.98,2");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn draws_reject_garbage() {
        let head = "id,model,chain,iteration,values\n";
        assert!(parse_draws(&format!("{head}a,lgt,0,1,inf\n")).is_err());
        assert!(parse_draws(&format!("{head}a,lgt,-1,1,2\n")).is_err());
        assert!(parse_draws(&format!("{head}a,lgt,0,1\n")).is_err());
        assert!(parse_draws("").unwrap().is_empty());
    }
}
