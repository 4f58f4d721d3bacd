//! SCADA observation records and the four cleaning rules.
//!
//! Rules are applied in order: missing grid timestamps (NA), incomplete
//! records (IN), not-normal operation (NNO), then per-wind-bin box-plot
//! outliers on power. Each discarded record is attributed to the first rule
//! that fires.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;


use crate::stats::quantile_type7;
use crate::{Error, Result, WindBin};

/// SCADA sampling step in minutes.
pub const SAMPLING_STEP_MINUTES: i64 = 10;

/// Operational state reported by the turbine controller.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OperationalState {
    Normal,
    Derated,
    FreeRotation,
    Stopped,
    Other(String),
}

impl OperationalState {
    pub fn is_normal(&self) -> bool {
        matches!(self, OperationalState::Normal)
    }

    /// Parses a state code; unknown codes are kept verbatim as not normal.
    pub fn parse(code: &str) -> Self {
        let c = code.trim();
        if c.eq_ignore_ascii_case("normal") || c == "0" {
            OperationalState::Normal
        } else if c.eq_ignore_ascii_case("derated") {
            OperationalState::Derated
        } else if c.eq_ignore_ascii_case("free_rotation") || c.eq_ignore_ascii_case("freerotation") {
            OperationalState::FreeRotation
        } else if c.eq_ignore_ascii_case("stopped") {
            OperationalState::Stopped
        } else {
            OperationalState::Other(String::from(c))
        }
    }

    pub fn code(&self) -> &str {
        match self {
            OperationalState::Normal => "NORMAL",
            OperationalState::Derated => "DERATED",
            OperationalState::FreeRotation => "FREE_ROTATION",
            OperationalState::Stopped => "STOPPED",
            OperationalState::Other(s) => s,
        }
    }
}

/// One 10-minute SCADA row. Any signal may be missing.
#[derive(Debug, Clone, PartialEq)]
pub struct ScadaRecord {
    /// Minutes since the Unix epoch.
    pub timestamp: i64,
    pub wind: Option<f64>,
    /// Incidence angle relative to the nacelle, degrees.
    pub angle: Option<f64>,
    pub temperature: Option<f64>,
    pub power: Option<f64>,
    pub state: Option<OperationalState>,
}

impl ScadaRecord {
    pub fn is_complete(&self) -> bool {
        self.wind.is_some()
            && self.angle.is_some()
            && self.temperature.is_some()
            && self.power.is_some()
            && self.state.is_some()
    }

    /// Complete, normal-state record as a [`Sample`].
    pub fn to_sample(&self) -> Option<Sample> {
        match (&self.state, self.wind, self.angle, self.temperature, self.power) {
            (Some(s), Some(wind), Some(angle), Some(temperature), Some(power)) if s.is_normal() => {
                Some(Sample { timestamp: self.timestamp, wind, angle, temperature, power })
            }
            _ => None,
        }
    }
}

impl From<&Sample> for ScadaRecord {
    fn from(s: &Sample) -> Self {
        ScadaRecord {
            timestamp: s.timestamp,
            wind: Some(s.wind),
            angle: Some(s.angle),
            temperature: Some(s.temperature),
            power: Some(s.power),
            state: Some(OperationalState::Normal),
        }
    }
}

/// A complete observation in normal operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub timestamp: i64,
    pub wind: f64,
    pub angle: f64,
    pub temperature: f64,
    pub power: f64,
}

impl Sample {
    pub fn wind_bin(&self) -> WindBin {
        WindBin::from_speed(self.wind)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CleaningReport {
    /// Grid slots between the first and last timestamp, plus off-grid rows.
    pub raw: usize,
    pub missing: usize,
    pub incomplete: usize,
    pub not_normal: usize,
    pub outliers: usize,
    pub retained: usize,
}

impl CleaningReport {
    /// NA, IN and NNO merged, as in the usual cleaning summary table.
    pub fn na_in_nno(&self) -> usize {
        self.missing + self.incomplete + self.not_normal
    }

    pub fn discarded(&self) -> usize {
        self.na_in_nno() + self.outliers
    }

    pub fn proportion(&self) -> f64 {
        if self.raw == 0 {
            0.0
        } else {
            self.retained as f64 / self.raw as f64
        }
    }
}

/// Cleaned, time-ordered samples plus the report of what was dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct CleanDataset {
    samples: Vec<Sample>,
    report: CleaningReport,
}

impl CleanDataset {
    /// Wraps samples that are already clean (e.g. from the generator).
    pub fn from_samples(mut samples: Vec<Sample>) -> Self {
        samples.sort_by_key(|s| s.timestamp);
        let n = samples.len();
        CleanDataset {
            samples,
            report: CleaningReport { raw: n, retained: n, ..CleaningReport::default() },
        }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn report(&self) -> &CleaningReport {
        &self.report
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<Sample> {
        self.samples
    }

    pub fn to_records(&self) -> Vec<ScadaRecord> {
        self.samples.iter().map(ScadaRecord::from).collect()
    }
}

/// Default whisker multiplier for the outlier rule.
pub const DEFAULT_IQR_K: f64 = 3.0;

/// Wind groups smaller than this skip the outlier rule.
pub const MIN_OUTLIER_GROUP: usize = 4;

/// Applies the four cleaning rules.
///
/// Power outside the closed whisker interval `[Q1 - k IQR, Q3 + k IQR]` of its
/// wind group is an outlier; quartiles are type-7.
pub fn clean(records: &[ScadaRecord], iqr_k: f64) -> Result<CleanDataset> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no SCADA records"));
    }
    if !(iqr_k > 0.0) || !iqr_k.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!("iqr_k must be positive, got {iqr_k}")));
    }

    let mut report = CleaningReport { missing: missing_grid_slots(records), ..Default::default() };
    report.raw = records.len() + report.missing;

    let mut kept: Vec<Sample> = Vec::with_capacity(records.len());
    for r in records {
        if !r.is_complete() {
            report.incomplete += 1;
        } else if let Some(s) = r.to_sample() {
            kept.push(s);
        } else {
            report.not_normal += 1;
        }
    }

    let mut groups: BTreeMap<WindBin, Vec<usize>> = BTreeMap::new();
    for (i, s) in kept.iter().enumerate() {
        groups.entry(s.wind_bin()).or_default().push(i);
    }
    let mut drop = alloc::vec![false; kept.len()];
    for idx in groups.values() {
        if idx.len() < MIN_OUTLIER_GROUP {
            continue;
        }
        let mut powers: Vec<f64> = idx.iter().map(|&i| kept[i].power).collect();
        powers.sort_by(f64::total_cmp);
        let q1 = quantile_type7(&powers, 0.25);
        let q3 = quantile_type7(&powers, 0.75);
        let iqr = q3 - q1;
        let (lo, hi) = (q1 - iqr_k * iqr, q3 + iqr_k * iqr);
        for &i in idx {
            let p = kept[i].power;
            if p < lo || p > hi {
                drop[i] = true;
            }
        }
    }
    report.outliers = drop.iter().filter(|&&d| d).count();
    let mut samples: Vec<Sample> =
        kept.into_iter().zip(drop).filter_map(|(s, d)| (!d).then_some(s)).collect();
    samples.sort_by_key(|s| s.timestamp);
    report.retained = samples.len();
    if samples.is_empty() {
        return Err(Error::EmptyAfterCleaning);
    }
    Ok(CleanDataset { samples, report })
}

/// Grid slots between min and max timestamp with no record.
fn missing_grid_slots(records: &[ScadaRecord]) -> usize {
    let (Some(min), Some(max)) = (
        records.iter().map(|r| r.timestamp).min(),
        records.iter().map(|r| r.timestamp).max(),
    ) else {
        return 0;
    };
    let slots = ((max - min) / SAMPLING_STEP_MINUTES + 1) as usize;
    let on_grid: BTreeSet<i64> = records
        .iter()
        .map(|r| r.timestamp)
        .filter(|t| (t - min) % SAMPLING_STEP_MINUTES == 0)
        .collect();
    slots - on_grid.len()
}
