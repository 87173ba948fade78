//! Ingestion and emission: model specs as JSON, samples and schedules as
//! CSV, weighted empiricals as CSV + JSON, experiment configs as JSON.
//!
//! Every emitter here is the exact inverse of its parser on the data model
//! (floats are printed in shortest round-trip form), and every parser
//! reports malformed input as `Error::Ingest` with a 1-based row number.
//! Dialect: comma-separated, '.' decimal, LF line endings, UTF-8.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dist::Model;
use crate::error::{Error, Result};
use crate::points::Points;
use crate::tilt::WeightedEmpirical;

/// Model spec from a JSON object {"family": ..., "params": ...}; the parsed
/// model is validated before it is returned.
pub fn parse_model_json(text: &str) -> Result<Model> {
    let model: Model = serde_json::from_str(text)
        .map_err(|e| Error::Ingest { row: e.line(), reason: format!("model JSON: {e}") })?;
    model.validate()?;
    Ok(model)
}

pub fn emit_model_json(model: &Model) -> String {
    serde_json::to_string_pretty(model).expect("model serialization is infallible")
}

fn parse_cell(raw: &str, row: usize) -> Result<f64> {
    let value: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::Ingest { row, reason: format!("not a number: {raw:?}") })?;
    if !value.is_finite() {
        return Err(Error::Ingest { row, reason: format!("non-finite value: {raw:?}") });
    }
    Ok(value)
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn record_row(record: &csv::StringRecord, fallback: usize) -> usize {
    record.position().map_or(fallback, |p| p.line() as usize)
}

/// Sample ingestion: one observation per row, d numeric columns, optional
/// header (detected by a non-numeric first row). The column count of the
/// first data row fixes d.
pub fn parse_samples_csv(text: &str) -> Result<Points> {
    let mut points: Option<Points> = None;
    for (i, record) in csv_reader(text).records().enumerate() {
        let record = record.map_err(|e| Error::Ingest {
            row: e.position().map_or(i + 1, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let row = record_row(&record, i + 1);
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let is_first = points.is_none();
        if is_first && record.iter().any(|f| f.trim().parse::<f64>().is_err()) {
            // Header row; d is fixed by the first data row instead.
            continue;
        }
        let mut parsed = Vec::with_capacity(record.len());
        for cell in record.iter() {
            parsed.push(parse_cell(cell, row)?);
        }
        let store = points.get_or_insert_with(|| Points::with_capacity(16, parsed.len()));
        if parsed.len() != store.dim() {
            return Err(Error::Ingest {
                row,
                reason: format!("expected {} columns, found {}", store.dim(), parsed.len()),
            });
        }
        store.push_row(&parsed).expect("dimension pre-checked");
    }
    points.ok_or(Error::EmptySample)
}

pub fn emit_samples_csv(points: &Points) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=points.dim()).map(|j| format!("x{j}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in points.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    /// Rows are (n, theta); M_theta is computed downstream against a model.
    Theta,
    /// Rows are (n, M_theta), precomputed.
    MTheta,
}

/// A tilt schedule: sample sizes paired with either tilt magnitudes or
/// precomputed M_theta values, per the required header.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub rows: Vec<(f64, f64)>,
}

/// Schedule ingestion. The header is mandatory — "n,theta" or "n,m"
/// (case-insensitive) — because the two layouts are indistinguishable from
/// the numbers alone.
pub fn parse_schedule_csv(text: &str) -> Result<Schedule> {
    let mut reader = csv_reader(text);
    let mut records = reader.records().enumerate();
    let (_, header) = records.next().ok_or(Error::Ingest {
        row: 1,
        reason: "empty schedule: expected a header row 'n,theta' or 'n,m'".into(),
    })?;
    let header = header.map_err(|e| Error::Ingest { row: 1, reason: e.to_string() })?;
    let cols: Vec<String> =
        header.iter().map(|f| f.trim().to_ascii_lowercase()).collect();
    let kind = match cols.as_slice() {
        [n, t] if n == "n" && t == "theta" => ScheduleKind::Theta,
        [n, m] if n == "n" && (m == "m" || m == "m_theta") => ScheduleKind::MTheta,
        _ => {
            return Err(Error::Ingest {
                row: 1,
                reason: format!("schedule header must be 'n,theta' or 'n,m', found {cols:?}"),
            })
        }
    };
    let mut rows = Vec::new();
    for (i, record) in records {
        let record = record.map_err(|e| Error::Ingest {
            row: e.position().map_or(i + 1, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let row = record_row(&record, i + 1);
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::Ingest {
                row,
                reason: format!("expected 2 columns, found {}", record.len()),
            });
        }
        let n = parse_cell(&record[0], row)?;
        let value = parse_cell(&record[1], row)?;
        if n <= 0.0 {
            return Err(Error::Ingest { row, reason: format!("n must be positive, got {n}") });
        }
        rows.push((n, value));
    }
    if rows.is_empty() {
        return Err(Error::Ingest { row: 1, reason: "schedule has no data rows".into() });
    }
    Ok(Schedule { kind, rows })
}

pub fn emit_schedule_csv(schedule: &Schedule) -> String {
    let mut out = String::from(match schedule.kind {
        ScheduleKind::Theta => "n,theta\n",
        ScheduleKind::MTheta => "n,m\n",
    });
    for (n, value) in &schedule.rows {
        out.push_str(&format!("{n},{value}\n"));
    }
    out
}

/// Weighted empirical as CSV: point columns then a weight column. The CSV
/// carries no log-normalizer (that lives in the JSON form), so parsing
/// reconstructs the distribution with log_normalizer = 0.
pub fn parse_weighted_csv(text: &str) -> Result<WeightedEmpirical> {
    let wide = parse_samples_csv(text)?;
    if wide.dim() < 2 {
        return Err(Error::Ingest {
            row: 1,
            reason: "weighted CSV needs at least one point column plus a weight column".into(),
        });
    }
    let dim = wide.dim() - 1;
    let mut points = Points::with_capacity(wide.len(), dim);
    let mut weights = Vec::with_capacity(wide.len());
    for row in wide.rows() {
        points.push_row(&row[..dim]).expect("dimension fixed");
        weights.push(row[dim]);
    }
    WeightedEmpirical::new(points, weights, 0.0)
}

pub fn emit_weighted_csv(we: &WeightedEmpirical) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = (1..=we.dim()).map(|j| format!("x{j}")).collect();
    header.push("weight".into());
    out.push_str(&header.join(","));
    out.push('\n');
    for (row, w) in we.points().rows().zip(we.weights()) {
        let mut cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        cells.push(format!("{w}"));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct WeightedJson {
    dim: usize,
    log_normalizer: f64,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

/// Weighted empirical as JSON, including the log-normalizer metadata; the
/// exact inverse of `emit_weighted_json`.
pub fn parse_weighted_json(text: &str) -> Result<WeightedEmpirical> {
    let raw: WeightedJson = serde_json::from_str(text)
        .map_err(|e| Error::Ingest { row: e.line(), reason: format!("weighted JSON: {e}") })?;
    if raw.dim == 0 {
        return Err(Error::Ingest { row: 1, reason: "dim must be positive".into() });
    }
    let mut points = Points::with_capacity(raw.points.len(), raw.dim);
    for (i, row) in raw.points.iter().enumerate() {
        if row.len() != raw.dim {
            return Err(Error::Ingest {
                row: i + 1,
                reason: format!("point {} has {} coordinates, dim is {}", i, row.len(), raw.dim),
            });
        }
        points.push_row(row).expect("dimension pre-checked");
    }
    WeightedEmpirical::new(points, raw.weights, raw.log_normalizer)
}

pub fn emit_weighted_json(we: &WeightedEmpirical) -> String {
    let raw = WeightedJson {
        dim: we.dim(),
        log_normalizer: we.log_normalizer(),
        points: we.points().rows().map(|r| r.to_vec()).collect(),
        weights: we.weights().to_vec(),
    };
    serde_json::to_string_pretty(&raw).expect("weighted serialization is infallible")
}

fn default_replicates() -> u64 {
    1
}

fn default_out() -> String {
    "out".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntry {
    pub n: u64,
    pub theta: f64,
}

/// One experiment: a model, a tilt schedule, and explicit seeds — re-running
/// with the same config is byte-identical, so wall-clock entropy is banned
/// by construction (the seed field is mandatory).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: String,
    pub model: Model,
    pub schedule: Vec<ScheduleEntry>,
    pub seed: u64,
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    #[serde(default = "default_out")]
    pub out: String,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::invalid("id", "experiment id must be nonempty"));
        }
        self.model.validate()?;
        if self.schedule.is_empty() {
            return Err(Error::invalid("schedule", "need at least one (n, theta) entry"));
        }
        for entry in &self.schedule {
            if entry.n == 0 || !entry.theta.is_finite() {
                return Err(Error::invalid("schedule", "need n >= 1 and finite theta"));
            }
        }
        if self.replicates == 0 {
            return Err(Error::invalid("replicates", "must be at least 1"));
        }
        if self.tolerances.values().any(|t| !(*t > 0.0)) {
            return Err(Error::invalid("tolerances", "overrides must be positive"));
        }
        Ok(())
    }
}

pub fn parse_experiment_json(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = serde_json::from_str(text)
        .map_err(|e| Error::Ingest { row: e.line(), reason: format!("experiment JSON: {e}") })?;
    config.validate()?;
    Ok(config)
}

/// A batch of experiments; ids must be unique.
pub fn parse_experiments_json(text: &str) -> Result<Vec<ExperimentConfig>> {
    let configs: Vec<ExperimentConfig> = serde_json::from_str(text)
        .map_err(|e| Error::Ingest { row: e.line(), reason: format!("experiment JSON: {e}") })?;
    for (i, config) in configs.iter().enumerate() {
        config.validate()?;
        if configs[..i].iter().any(|c| c.id == config.id) {
            return Err(Error::invalid("id", format!("duplicate experiment id {:?}", config.id)));
        }
    }
    Ok(configs)
}

pub fn emit_experiment_json(config: &ExperimentConfig) -> String {
    serde_json::to_string_pretty(config).expect("config serialization is infallible")
}
