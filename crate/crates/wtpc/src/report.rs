//! Plot-ready CSV tables and the evaluation summary.

use std::path::Path;

use serde::Serialize;
use wtpc_core::estimation::BinnedStats;
use wtpc_core::evaluation::{horizon_steps, Coverage, HorizonReport};
use wtpc_core::residuals::ResidualProfile;
use wtpc_core::selection::SelectionResult;

use crate::artifacts::write_json;
use crate::error::AppResult;
use crate::io::{format_timestamp, write_table};

fn num(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        String::new()
    }
}

pub fn write_binned_stats(path: &Path, stats: &BinnedStats) -> AppResult<()> {
    let rows: Vec<Vec<String>> = stats
        .iter()
        .map(|(bin, b)| vec![bin.to_string(), b.count.to_string(), num(b.mean), num(b.std_dev())])
        .collect();
    write_table(path, &["wind", "count", "mean", "std"], &rows)
}

pub fn write_sweep(path: &Path, result: &SelectionResult) -> AppResult<()> {
    let rows: Vec<Vec<String>> = result
        .sweep
        .iter()
        .map(|e| vec![e.order.to_string(), e.n_params.to_string(), num(e.train_mse), num(e.bic)])
        .collect();
    write_table(path, &["m", "n_params", "mse", "bic"], &rows)
}

pub fn write_profile(path: &Path, profile: &ResidualProfile) -> AppResult<()> {
    let rows: Vec<Vec<String>> = profile
        .sigma
        .bins()
        .iter()
        .map(|(bin, b)| {
            let p = profile.ad_pvalues.get(bin).map(|p| num(*p)).unwrap_or_default();
            vec![bin.to_string(), num(b.sigma), b.count.to_string(), p]
        })
        .collect();
    write_table(path, &["wind", "sigma", "n", "ad_p"], &rows)
}

/// Histogram of scaled residuals on `[-5, 5]` in steps of 0.25.
pub fn write_histogram(path: &Path, scaled: &[f64]) -> AppResult<()> {
    const LO: f64 = -5.0;
    const WIDTH: f64 = 0.25;
    const BINS: usize = 40;
    let mut counts = [0usize; BINS];
    for &z in scaled {
        let k = ((z - LO) / WIDTH).floor();
        if k >= 0.0 && (k as usize) < BINS {
            counts[k as usize] += 1;
        }
    }
    let total = scaled.len().max(1) as f64;
    let rows: Vec<Vec<String>> = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let lo = LO + k as f64 * WIDTH;
            vec![num(lo), num(lo + WIDTH), c.to_string(), num(c as f64 / (total * WIDTH))]
        })
        .collect();
    write_table(path, &["lo", "hi", "count", "density"], &rows)
}

/// One forecast row: timestamp, mean, variance and the band at `level`.
pub fn write_forecasts(path: &Path, rows: &[(i64, f64, f64, f64, f64)], level: f64) -> AppResult<()> {
    let pct = format!("{}", (level * 100.0).round() as i64);
    let lo = format!("lo{pct}");
    let hi = format!("hi{pct}");
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|&(t, m, v, l, h)| vec![format_timestamp(t), num(m), num(v), num(l), num(h)])
        .collect();
    write_table(path, &["timestamp", "p_hat", "var", &lo, &hi], &table)
}

#[derive(Serialize)]
struct DynamicSummary {
    q1: usize,
    q2: usize,
    mse: Vec<f64>,
}

#[derive(Serialize)]
struct CoverageSummary {
    level: f64,
    n: usize,
    fraction: f64,
    in_band_n: usize,
    in_band_fraction: Option<f64>,
}

impl From<&Coverage> for CoverageSummary {
    fn from(c: &Coverage) -> Self {
        CoverageSummary {
            level: c.level,
            n: c.n,
            fraction: c.fraction,
            in_band_n: c.in_band_n,
            in_band_fraction: c.in_band_fraction.is_finite().then_some(c.in_band_fraction),
        }
    }
}

#[derive(Serialize)]
struct Summary {
    horizons: Vec<f64>,
    delta: f64,
    static_mse: Vec<f64>,
    enhanced_mse: Vec<f64>,
    dynamic: Vec<DynamicSummary>,
    coverage: Option<CoverageSummary>,
}

/// Writes `horizons.csv` (one row per horizon, one column per model),
/// `coverage.csv` when a coverage audit ran, and `summary.json`.
pub fn emit_report(report: &HorizonReport, delta: f64, dir: &Path) -> AppResult<()> {
    let mut header: Vec<String> = vec!["horizon".into(), "steps".into(), "static".into(), "enhanced".into()];
    for d in &report.dynamic {
        header.push(format!("arma_{}_{}", d.q1, d.q2));
    }
    let mut rows = Vec::with_capacity(report.horizons.len());
    for (i, &h) in report.horizons.iter().enumerate() {
        let steps = horizon_steps(h, delta)?;
        let mut row = vec![num(h), steps.to_string(), num(report.static_mse[i]), num(report.enhanced_mse[i])];
        row.extend(report.dynamic.iter().map(|d| num(d.mse[i])));
        rows.push(row);
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_table(&dir.join("horizons.csv"), &header_refs, &rows)?;

    if let Some(c) = &report.coverage {
        let in_band = if c.in_band_fraction.is_finite() { num(c.in_band_fraction) } else { String::new() };
        write_table(
            &dir.join("coverage.csv"),
            &["level", "n", "fraction", "in_band_n", "in_band_fraction"],
            &[vec![num(c.level), c.n.to_string(), num(c.fraction), c.in_band_n.to_string(), in_band]],
        )?;
    }

    let summary = Summary {
        horizons: report.horizons.clone(),
        delta,
        static_mse: report.static_mse.clone(),
        enhanced_mse: report.enhanced_mse.clone(),
        dynamic: report
            .dynamic
            .iter()
            .map(|d| DynamicSummary { q1: d.q1, q2: d.q2, mse: d.mse.clone() })
            .collect(),
        coverage: report.coverage.as_ref().map(CoverageSummary::from),
    };
    write_json(&dir.join("summary.json"), &summary)
}
