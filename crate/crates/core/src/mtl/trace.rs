//! Timed state sequences: sampled output signals with strictly increasing
//! sample times.

use std::io::{Read, Write};
use std::ops::Range;
use std::path::Path;

use thiserror::Error;

use super::formula::GroundInterval;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace has no samples")]
    Empty,
    #[error("sample times must be strictly increasing (index {index}: {prev} then {next})")]
    NonIncreasing { index: usize, prev: f64, next: f64 },
    #[error("non-finite value in channel `{channel}` at index {index}")]
    NonFinite { channel: String, index: usize },
    #[error("channel `{channel}` has {got} samples, expected {expected}")]
    LengthMismatch {
        channel: String,
        got: usize,
        expected: usize,
    },
    #[error("duplicate channel `{0}`")]
    DuplicateChannel(String),
    #[error("first CSV column must be `time`, found `{0}`")]
    MissingTimeColumn(String),
    #[error("CSV row {row}: {message}")]
    Row { row: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A finite sequence of output samples `y(i)` at times `τ(i)`, stored by
/// channel.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedStateSequence {
    times: Vec<f64>,
    channels: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl TimedStateSequence {
    /// Builds a trace from one column per channel.
    pub fn new(
        times: Vec<f64>,
        channels: Vec<String>,
        columns: Vec<Vec<f64>>,
    ) -> Result<Self, TraceError> {
        if times.is_empty() {
            return Err(TraceError::Empty);
        }
        for (index, t) in times.iter().enumerate() {
            if !t.is_finite() {
                return Err(TraceError::NonFinite {
                    channel: "time".into(),
                    index,
                });
            }
        }
        for (index, w) in times.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(TraceError::NonIncreasing {
                    index: index + 1,
                    prev: w[0],
                    next: w[1],
                });
            }
        }
        if channels.len() != columns.len() {
            return Err(TraceError::LengthMismatch {
                channel: "<channels>".into(),
                got: columns.len(),
                expected: channels.len(),
            });
        }
        for (k, name) in channels.iter().enumerate() {
            if channels[..k].contains(name) {
                return Err(TraceError::DuplicateChannel(name.clone()));
            }
            let col = &columns[k];
            if col.len() != times.len() {
                return Err(TraceError::LengthMismatch {
                    channel: name.clone(),
                    got: col.len(),
                    expected: times.len(),
                });
            }
            if let Some(index) = col.iter().position(|v| !v.is_finite()) {
                return Err(TraceError::NonFinite {
                    channel: name.clone(),
                    index,
                });
            }
        }
        Ok(Self {
            times,
            channels,
            columns,
        })
    }

    /// Builds a trace from row-major samples.
    pub fn from_rows(
        times: Vec<f64>,
        channels: Vec<String>,
        rows: &[Vec<f64>],
    ) -> Result<Self, TraceError> {
        let mut columns = vec![Vec::with_capacity(rows.len()); channels.len()];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != channels.len() {
                return Err(TraceError::Row {
                    row: r,
                    message: format!("expected {} values, got {}", channels.len(), row.len()),
                });
            }
            for (c, v) in row.iter().enumerate() {
                columns[c].push(*v);
            }
        }
        Self::new(times, channels, columns)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn channel_index(&self, name: &str) -> Option<usize> {
        self.channels.iter().position(|c| c == name)
    }

    pub fn column(&self, channel: usize) -> &[f64] {
        &self.columns[channel]
    }

    /// The output vector at sample `i`.
    pub fn sample(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, TraceError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let first = headers.get(0).unwrap_or("").to_string();
        if first != "time" {
            return Err(TraceError::MissingTimeColumn(first));
        }
        let channels: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        let mut times = Vec::new();
        let mut columns = vec![Vec::new(); channels.len()];
        for (r, record) in rdr.records().enumerate() {
            let record = record?;
            let row = r + 2;
            if record.len() != channels.len() + 1 {
                return Err(TraceError::Row {
                    row,
                    message: format!(
                        "expected {} fields, got {}",
                        channels.len() + 1,
                        record.len()
                    ),
                });
            }
            for (k, field) in record.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| TraceError::Row {
                    row,
                    message: format!("cannot parse `{field}` as a number"),
                })?;
                if k == 0 {
                    times.push(v);
                } else {
                    columns[k - 1].push(v);
                }
            }
        }
        Self::new(times, channels, columns)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self, TraceError> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), TraceError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["time".to_string()];
        header.extend(self.channels.iter().cloned());
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut row = vec![self.times[i].to_string()];
            row.extend(self.columns.iter().map(|c| c[i].to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// The index range `{j : τ(j) ∈ τ(i) + I}`.
///
/// Membership is decided on the offset `τ(j) − τ(i)` with
/// [`GroundInterval::contains_offset`]; offsets are monotone in `j`, so the
/// set is contiguous.
pub fn preimage(times: &[f64], i: usize, interval: &GroundInterval) -> Range<usize> {
    let ti = times[i];
    let start = times.partition_point(|&t| {
        let d = t - ti;
        if interval.lower_closed {
            d < interval.lower
        } else {
            d <= interval.lower
        }
    });
    let end = times.partition_point(|&t| {
        let d = t - ti;
        if interval.upper_closed {
            d <= interval.upper
        } else {
            d < interval.upper
        }
    });
    start..end.max(start)
}
