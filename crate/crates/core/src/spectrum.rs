//! Ingestion of ELF magnetic-field spectrum measurements.
//!
//! Measurement files are CSV with the fixed header
//! `adapter_id,position,frequency_hz,timestamp_ms,b_total_ut,b_x_ut,b_y_ut,b_z_ut`.
//! Each row is one timestamped reading of the magnetic induction magnitude (in
//! microtesla) at one frequency, one measurement position, one adapter. The
//! optional component columns may be left empty.
//!
//! Readings are aggregated two ways: [`build_dataset`] averages the magnitude
//! over time per `(adapter, frequency)` to form the per-position training set,
//! and [`summarize_adapters`] reduces everything to a per-adapter table of
//! mean and peak field per side.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The fixed CSV header line, without trailing newline.
pub const CSV_HEADER: &str =
    "adapter_id,position,frequency_hz,timestamp_ms,b_total_ut,b_x_ut,b_y_ut,b_z_ut";

/// Where a reading was taken relative to the adapter: touching its top or
/// bottom surface, or 30 cm away in one of four directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementPosition {
    Top,
    Bottom,
    Left30,
    Right30,
    Up30,
    Down30,
}

impl MeasurementPosition {
    /// All six positions, in display order.
    pub const ALL: [MeasurementPosition; 6] = [
        MeasurementPosition::Top,
        MeasurementPosition::Bottom,
        MeasurementPosition::Left30,
        MeasurementPosition::Right30,
        MeasurementPosition::Up30,
        MeasurementPosition::Down30,
    ];

    /// Canonical lowercase token used in CSV files and on the command line.
    pub fn token(self) -> &'static str {
        match self {
            MeasurementPosition::Top => "top",
            MeasurementPosition::Bottom => "bottom",
            MeasurementPosition::Left30 => "left30",
            MeasurementPosition::Right30 => "right30",
            MeasurementPosition::Up30 => "up30",
            MeasurementPosition::Down30 => "down30",
        }
    }

    /// Case-insensitive token lookup. Any string outside the six tokens is
    /// rejected; the enumeration is closed.
    pub fn parse_token(s: &str) -> Option<Self> {
        let lower = s.trim().to_ascii_lowercase();
        MeasurementPosition::ALL
            .into_iter()
            .find(|p| p.token() == lower)
    }
}

impl fmt::Display for MeasurementPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Error type for [`MeasurementPosition::from_str`].
#[derive(Debug, Clone, Error)]
#[error("unknown position {0:?} (expected top|bottom|left30|right30|up30|down30)")]
pub struct PositionParseError(pub String);

impl FromStr for MeasurementPosition {
    type Err = PositionParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MeasurementPosition::parse_token(s).ok_or_else(|| PositionParseError(s.to_string()))
    }
}

/// One timestamped magnetic-induction reading.
///
/// `b_total_ut` is the field magnitude in microtesla; the optional `b_x_ut`,
/// `b_y_ut`, `b_z_ut` components are stored verbatim when present and never
/// checked against the magnitude (the instrument rounds each independently).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSample {
    pub adapter_id: String,
    pub position: MeasurementPosition,
    pub frequency_hz: f64,
    pub timestamp_ms: i64,
    pub b_total_ut: f64,
    pub b_x_ut: Option<f64>,
    pub b_y_ut: Option<f64>,
    pub b_z_ut: Option<f64>,
}

/// One training instance: the time-averaged field for an adapter at one
/// frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionInstance {
    pub adapter_id: String,
    pub frequency_hz: f64,
    pub b_mean_ut: f64,
}

/// Per-position training set: one instance per `(adapter, frequency)`, sorted
/// by adapter id then frequency ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionDataset {
    position: MeasurementPosition,
    instances: Vec<EmissionInstance>,
    frequency_band: (f64, f64),
}

impl EmissionDataset {
    pub fn position(&self) -> MeasurementPosition {
        self.position
    }

    pub fn instances(&self) -> &[EmissionInstance] {
        &self.instances
    }

    /// Observed `(f_min, f_max)` over all instances, in hertz.
    pub fn frequency_band(&self) -> (f64, f64) {
        self.frequency_band
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// One-dimensional feature vectors (the mean field per instance), in
    /// instance order.
    pub fn feature_vectors(&self) -> Vec<Vec<f64>> {
        self.instances.iter().map(|i| vec![i.b_mean_ut]).collect()
    }
}

/// Mean and peak field at one position, over all frequencies and timestamps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionStats {
    pub b_mean_ut: f64,
    pub b_max_ut: f64,
}

/// Per-adapter emission summary; positions with no readings are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct AdapterSummary {
    pub adapter_id: String,
    pub positions: BTreeMap<MeasurementPosition, PositionStats>,
}

/// Errors from [`parse_spectrum_csv`]. Row numbers are 1-based and count the
/// header, so the first data row is row 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("missing or malformed header (expected {CSV_HEADER:?})")]
    MissingHeader,
    #[error("row {row}: expected 8 fields, found {found}")]
    WrongColumnCount { row: usize, found: usize },
    #[error("row {row}: unknown position {token:?}")]
    UnknownPosition { row: usize, token: String },
    #[error("row {row}: column {column} is not a number: {value:?}")]
    NonNumericField {
        row: usize,
        column: &'static str,
        value: String,
    },
    #[error("row {row}: column {column} must be non-negative, found {value}")]
    NegativeField {
        row: usize,
        column: &'static str,
        value: f64,
    },
    #[error("row {row}: frequency must be positive, found {value}")]
    NonPositiveFrequency { row: usize, value: f64 },
}

/// Errors from [`build_dataset`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("no sample at position {0}")]
    EmptyPosition(MeasurementPosition),
}

fn parse_finite(raw: &str, row: usize, column: &'static str) -> Result<f64, ParseError> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| ParseError::NonNumericField {
            row,
            column,
            value: raw.to_string(),
        })?;
    if !v.is_finite() {
        return Err(ParseError::NonNumericField {
            row,
            column,
            value: raw.to_string(),
        });
    }
    Ok(v)
}

fn parse_optional(raw: &str, row: usize, column: &'static str) -> Result<Option<f64>, ParseError> {
    if raw.trim().is_empty() {
        Ok(None)
    } else {
        parse_finite(raw, row, column).map(Some)
    }
}

/// Parse a measurement file. Aborts on the first malformed row.
///
/// Lines may end in `\n` or `\r\n`; a trailing newline is optional. A file
/// with only the header yields an empty sample list.
pub fn parse_spectrum_csv(content: &str) -> Result<Vec<SpectrumSample>, ParseError> {
    let mut lines = content.lines();
    match lines.next() {
        Some(header) if header.trim_end() == CSV_HEADER => {}
        _ => return Err(ParseError::MissingHeader),
    }

    let mut samples = Vec::new();
    for (idx, line) in lines.enumerate() {
        let row = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(ParseError::WrongColumnCount {
                row,
                found: fields.len(),
            });
        }

        let position = MeasurementPosition::parse_token(fields[1]).ok_or_else(|| {
            ParseError::UnknownPosition {
                row,
                token: fields[1].to_string(),
            }
        })?;
        let frequency_hz = parse_finite(fields[2], row, "frequency_hz")?;
        if frequency_hz <= 0.0 {
            return Err(ParseError::NonPositiveFrequency {
                row,
                value: frequency_hz,
            });
        }
        let timestamp_ms: i64 =
            fields[3]
                .trim()
                .parse()
                .map_err(|_| ParseError::NonNumericField {
                    row,
                    column: "timestamp_ms",
                    value: fields[3].to_string(),
                })?;
        let b_total_ut = parse_finite(fields[4], row, "b_total_ut")?;
        if b_total_ut < 0.0 {
            return Err(ParseError::NegativeField {
                row,
                column: "b_total_ut",
                value: b_total_ut,
            });
        }

        samples.push(SpectrumSample {
            adapter_id: fields[0].trim().to_string(),
            position,
            frequency_hz,
            timestamp_ms,
            b_total_ut,
            b_x_ut: parse_optional(fields[5], row, "b_x_ut")?,
            b_y_ut: parse_optional(fields[6], row, "b_y_ut")?,
            b_z_ut: parse_optional(fields[7], row, "b_z_ut")?,
        });
    }
    Ok(samples)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Serialize samples back to the CSV format. Floats use the shortest
/// representation that round-trips exactly, so `parse(write(s)) == s`.
pub fn write_spectrum_csv(samples: &[SpectrumSample]) -> String {
    let mut out = String::with_capacity(samples.len() * 48 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            s.adapter_id,
            s.position.token(),
            s.frequency_hz,
            s.timestamp_ms,
            s.b_total_ut,
            fmt_opt(s.b_x_ut),
            fmt_opt(s.b_y_ut),
            fmt_opt(s.b_z_ut),
        ));
    }
    out
}

/// Group the samples taken at `position` by `(adapter, frequency)` and average
/// the field magnitude over time within each group.
///
/// The result is sorted by adapter id then frequency and carries the observed
/// frequency band. Shuffling the input yields an identical dataset.
pub fn build_dataset(
    samples: &[SpectrumSample],
    position: MeasurementPosition,
) -> Result<EmissionDataset, DatasetError> {
    let mut triples: Vec<(&str, f64, f64)> = samples
        .iter()
        .filter(|s| s.position == position)
        .map(|s| (s.adapter_id.as_str(), s.frequency_hz, s.b_total_ut))
        .collect();
    if triples.is_empty() {
        return Err(DatasetError::EmptyPosition(position));
    }
    triples.sort_by(|a, b| a.0.cmp(b.0).then(a.1.total_cmp(&b.1)));

    let mut instances: Vec<EmissionInstance> = Vec::new();
    let mut run_start = 0;
    for i in 0..=triples.len() {
        let run_done = i == triples.len()
            || triples[i].0 != triples[run_start].0
            || triples[i].1 != triples[run_start].1;
        if run_done {
            let group = &triples[run_start..i];
            let sum: f64 = group.iter().map(|t| t.2).sum();
            instances.push(EmissionInstance {
                adapter_id: group[0].0.to_string(),
                frequency_hz: group[0].1,
                b_mean_ut: sum / group.len() as f64,
            });
            run_start = i;
        }
    }

    let mut band = (f64::INFINITY, f64::NEG_INFINITY);
    for inst in &instances {
        band.0 = band.0.min(inst.frequency_hz);
        band.1 = band.1.max(inst.frequency_hz);
    }
    Ok(EmissionDataset {
        position,
        instances,
        frequency_band: band,
    })
}

/// Per-adapter mean and peak field per position, over all frequencies and
/// timestamps. Returns one summary per adapter, sorted by adapter id; an
/// empty input yields an empty list.
pub fn summarize_adapters(samples: &[SpectrumSample]) -> Vec<AdapterSummary> {
    let mut acc: BTreeMap<&str, BTreeMap<MeasurementPosition, (f64, f64, usize)>> = BTreeMap::new();
    for s in samples {
        let entry = acc
            .entry(s.adapter_id.as_str())
            .or_default()
            .entry(s.position)
            .or_insert((0.0, f64::NEG_INFINITY, 0));
        entry.0 += s.b_total_ut;
        entry.1 = entry.1.max(s.b_total_ut);
        entry.2 += 1;
    }
    acc.into_iter()
        .map(|(adapter_id, positions)| AdapterSummary {
            adapter_id: adapter_id.to_string(),
            positions: positions
                .into_iter()
                .map(|(pos, (sum, max, count))| {
                    (
                        pos,
                        PositionStats {
                            b_mean_ut: sum / count as f64,
                            b_max_ut: max,
                        },
                    )
                })
                .collect(),
        })
        .collect()
}
