//! Delimited SCADA files.
//!
//! Timestamps are read either as integer minutes since the Unix epoch or as
//! ISO-8601 date-times (`2013-06-01T00:00`, optional seconds and `Z`), and
//! written in the ISO form. Empty or unparseable measurement cells become
//! missing values.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};
use wtpc_core::dynamic::Exogenous;
use wtpc_core::scada::{OperationalState, Sample, ScadaRecord};

use crate::error::{AppError, AppResult};

/// Column names for the six SCADA fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub timestamp: String,
    pub wind: String,
    pub angle: String,
    pub temperature: String,
    pub power: String,
    pub state: String,
}

impl Default for Schema {
    fn default() -> Self {
        Schema {
            timestamp: "timestamp".into(),
            wind: "wind".into(),
            angle: "angle".into(),
            temperature: "temperature".into(),
            power: "power".into(),
            state: "state".into(),
        }
    }
}

impl Schema {
    /// Applies overrides of the form `wind=ws,power=p_kw` to the default names.
    pub fn parse(spec: &str) -> AppResult<Self> {
        let mut schema = Schema::default();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (field, column) = part
                .split_once('=')
                .ok_or_else(|| AppError::Usage(format!("schema entry {part:?} is not field=column")))?;
            let slot = match field.trim() {
                "timestamp" => &mut schema.timestamp,
                "wind" => &mut schema.wind,
                "angle" => &mut schema.angle,
                "temperature" => &mut schema.temperature,
                "power" => &mut schema.power,
                "state" => &mut schema.state,
                other => return Err(AppError::Usage(format!("unknown schema field {other:?}"))),
            };
            *slot = column.trim().to_string();
        }
        Ok(schema)
    }

    fn columns(&self) -> [&str; 6] {
        [&self.timestamp, &self.wind, &self.angle, &self.temperature, &self.power, &self.state]
    }
}

/// Which fields a file must provide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Required {
    /// All six columns.
    Full,
    /// Timestamp, wind, angle and temperature; power and state may be absent.
    Exogenous,
}

pub fn parse_timestamp(cell: &str) -> Option<i64> {
    let cell = cell.trim();
    if let Ok(m) = cell.parse::<i64>() {
        return Some(m);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(cell) {
        return Some(dt.timestamp().div_euclid(60));
    }
    let bare = cell.strip_suffix('Z').unwrap_or(cell);
    ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(bare, f).ok())
        .map(|dt| dt.and_utc().timestamp().div_euclid(60))
}

pub fn format_timestamp(minutes: i64) -> String {
    match DateTime::from_timestamp(minutes * 60, 0) {
        Some(dt) => dt.format("%Y-%m-%dT%H:%M").to_string(),
        None => minutes.to_string(),
    }
}

fn parse_number(cell: &str) -> Option<f64> {
    let cell = cell.trim();
    if cell.is_empty() {
        return None;
    }
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn reader(path: &Path, delimiter: u8) -> AppResult<csv::Reader<BufReader<File>>> {
    let file = File::open(path).map_err(|e| AppError::io(path, e))?;
    Ok(csv::ReaderBuilder::new().delimiter(delimiter).has_headers(true).flexible(true).from_reader(BufReader::new(file)))
}

/// Reads SCADA records in file order.
pub fn read_records(path: &Path, schema: &Schema, delimiter: u8, required: Required) -> AppResult<Vec<ScadaRecord>> {
    let mut rdr = reader(path, delimiter)?;
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let mut index = [None; 6];
    for (k, name) in schema.columns().iter().enumerate() {
        index[k] = find(name);
        let needed = required == Required::Full || k < 4;
        if index[k].is_none() && needed {
            return Err(AppError::Schema(format!("column {name:?} not found in {}", path.display())));
        }
    }
    let mut records = Vec::new();
    let mut seen: BTreeMap<i64, usize> = BTreeMap::new();
    for (row, result) in rdr.records().enumerate() {
        let rec = result?;
        let cell = |k: usize| index[k].and_then(|i| rec.get(i)).unwrap_or("");
        let ts_cell = cell(0);
        let timestamp = parse_timestamp(ts_cell).ok_or_else(|| {
            AppError::Data(format!("row {}: unparseable timestamp {ts_cell:?}", row + 2))
        })?;
        *seen.entry(timestamp).or_default() += 1;
        let state = cell(5).trim();
        records.push(ScadaRecord {
            timestamp,
            wind: parse_number(cell(1)),
            angle: parse_number(cell(2)),
            temperature: parse_number(cell(3)),
            power: parse_number(cell(4)),
            state: (!state.is_empty()).then(|| OperationalState::parse(state)),
        });
    }
    let dups: Vec<String> = seen.iter().filter(|(_, &c)| c > 1).map(|(&t, _)| format_timestamp(t)).collect();
    if !dups.is_empty() {
        return Err(AppError::DuplicateTimestamps(dups));
    }
    Ok(records)
}

/// Reads a file and keeps only complete, normal-state rows.
pub fn read_samples(path: &Path, schema: &Schema, delimiter: u8) -> AppResult<Vec<Sample>> {
    let records = read_records(path, schema, delimiter, Required::Full)?;
    let mut samples: Vec<Sample> = records.iter().filter_map(ScadaRecord::to_sample).collect();
    samples.sort_by_key(|s| s.timestamp);
    if samples.is_empty() {
        return Err(AppError::Data(format!("{} holds no complete normal-state rows", path.display())));
    }
    Ok(samples)
}

/// Reads future exogenous inputs (timestamp, wind, angle, temperature).
pub fn read_exogenous(path: &Path, schema: &Schema, delimiter: u8) -> AppResult<Vec<(i64, Exogenous)>> {
    let records = read_records(path, schema, delimiter, Required::Exogenous)?;
    records
        .iter()
        .map(|r| match (r.wind, r.angle, r.temperature) {
            (Some(wind), Some(angle), Some(temperature)) => Ok((r.timestamp, Exogenous { wind, angle, temperature })),
            _ => Err(AppError::Data(format!(
                "{}: exogenous row at {} is incomplete",
                path.display(),
                format_timestamp(r.timestamp)
            ))),
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub(crate) fn create(path: &Path) -> AppResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| AppError::io(path, e))
}

fn delim_char(delimiter: u8) -> char {
    delimiter as char
}

/// Writes records with the default column names.
pub fn write_records(path: &Path, records: &[ScadaRecord], delimiter: u8) -> AppResult<()> {
    let d = delim_char(delimiter);
    let mut out = create(path)?;
    let s = Schema::default();
    let io_err = |e| AppError::io(path, e);
    writeln!(out, "{}", s.columns().join(&d.to_string())).map_err(io_err)?;
    for r in records {
        writeln!(
            out,
            "{}{d}{}{d}{}{d}{}{d}{}{d}{}",
            format_timestamp(r.timestamp),
            opt(r.wind),
            opt(r.angle),
            opt(r.temperature),
            opt(r.power),
            r.state.as_ref().map(|s| s.code()).unwrap_or("")
        )
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn write_samples(path: &Path, samples: &[Sample], delimiter: u8) -> AppResult<()> {
    let records: Vec<ScadaRecord> = samples.iter().map(ScadaRecord::from).collect();
    write_records(path, &records, delimiter)
}

/// Writes a CSV with a header and pre-formatted rows.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> AppResult<()> {
    let mut out = create(path)?;
    let io_err = |e| AppError::io(path, e);
    writeln!(out, "{}", header.join(",")).map_err(io_err)?;
    for row in rows {
        writeln!(out, "{}", row.join(",")).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}
