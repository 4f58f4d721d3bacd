//! Horizon-indexed forecast error and prediction-band coverage.

use alloc::vec::Vec;

use crate::dynamic::{DynamicModel, Exogenous};
use crate::estimation::mse;
use crate::scada::{Sample, SAMPLING_STEP_MINUTES};
use crate::{Error, PowerCurve, Result};

/// Sampling step in minutes.
pub const DEFAULT_DELTA: f64 = SAMPLING_STEP_MINUTES as f64;

/// A model scored by [`mse_at_horizon`].
#[derive(Clone, Copy)]
pub enum Predictor<'a> {
    Static(&'a dyn PowerCurve),
    Dynamic(&'a DynamicModel),
}

/// Number of sampling steps covering `h` minutes, `ceil(h / delta)`.
pub fn horizon_steps(h: f64, delta: f64) -> Result<usize> {
    if !(h > 0.0 && h.is_finite()) || !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!("horizon {h} and step {delta} must be positive")));
    }
    let ratio = h / delta;
    let rounded = libm::round(ratio);
    // Exact multiples stay exact despite floating division.
    let steps = if (ratio - rounded).abs() <= 1e-9 * rounded.max(1.0) { rounded } else { libm::ceil(ratio) };
    Ok(steps as usize)
}

/// Mean squared error of predictions made `ceil(h / delta)` steps ahead.
///
/// Static models ignore the power history, so their score is the plain MSE
/// over `validation`. Dynamic models predict each `p_k` with `k >= s` from
/// the power history through `k - s` and the exogenous inputs through `k`,
/// and the mean runs over those `N - s` terms.
pub fn mse_at_horizon(model: Predictor<'_>, validation: &[Sample], h: f64, delta: f64) -> Result<f64> {
    let s = horizon_steps(h, delta)?;
    let n = validation.len();
    if s >= n {
        return Err(Error::HorizonTooLong { steps: s, len: n });
    }
    match model {
        Predictor::Static(m) => mse(m, validation),
        Predictor::Dynamic(m) => dynamic_horizon_mse(m, validation, s),
    }
}

fn dynamic_horizon_mse(model: &DynamicModel, samples: &[Sample], s: usize) -> Result<f64> {
    let n = samples.len();
    let in_band: Vec<bool> = samples.iter().map(|x| model.in_band(x.wind)).collect();
    let mut state = model.arma.initial_state();
    // In-band count over the window (k - s, k].
    let mut window = in_band[1..=s].iter().filter(|b| **b).count();
    let mut ss = 0.0;
    for k in s..n {
        if k > s {
            if in_band[k] {
                window += 1;
            }
            if in_band[k - s] {
                window -= 1;
            }
        }
        model.advance(&mut state, &samples[k - s])?;
        let x = &samples[k];
        let base = model.enhanced.eval(x.wind, x.angle, x.temperature)?;
        let pred = if in_band[k] {
            let path = state.forecast_path(&model.arma, window);
            base + model.profile.sigma_at(x.wind) * path[window - 1]
        } else {
            base
        };
        let e = x.power - pred;
        ss += e * e;
    }
    Ok(ss / (n - s) as f64)
}

/// Band coverage of one-step-ahead dynamic forecasts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coverage {
    pub level: f64,
    pub n: usize,
    /// Fraction of all samples inside their band.
    pub fraction: f64,
    pub in_band_n: usize,
    pub in_band_fraction: f64,
}

/// Runs along `validation`, forecasting each sample from the history before
/// it, and counts observations inside the `level` prediction band.
pub fn coverage_audit(model: &DynamicModel, validation: &[Sample], level: f64) -> Result<Coverage> {
    if validation.is_empty() {
        return Err(Error::EmptyInput("no validation samples"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(alloc::format!("level must be in (0, 1), got {level}")));
    }
    let mut state = model.arma.initial_state();
    let (mut hits, mut band_n, mut band_hits) = (0usize, 0usize, 0usize);
    for x in validation {
        let f = model.forecast_from(&state, &[Exogenous::from(x)], 1)?[0];
        let (lo, hi) = f.interval(level);
        let inside = x.power >= lo && x.power <= hi;
        hits += inside as usize;
        if model.in_band(x.wind) {
            band_n += 1;
            band_hits += inside as usize;
        }
        model.advance(&mut state, x)?;
    }
    let n = validation.len();
    Ok(Coverage {
        level,
        n,
        fraction: hits as f64 / n as f64,
        in_band_n: band_n,
        in_band_fraction: if band_n > 0 { band_hits as f64 / band_n as f64 } else { f64::NAN },
    })
}

/// MSE per horizon for one dynamic configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicScores {
    pub q1: usize,
    pub q2: usize,
    pub mse: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizonReport {
    /// Horizons in minutes.
    pub horizons: Vec<f64>,
    pub static_mse: Vec<f64>,
    pub enhanced_mse: Vec<f64>,
    pub dynamic: Vec<DynamicScores>,
    pub coverage: Option<Coverage>,
}

/// Scores the static curve, the enhanced curve and every dynamic model at
/// each horizon. Coverage is audited on the first dynamic model when `level`
/// is given.
pub fn horizon_report(
    static_model: &dyn PowerCurve,
    enhanced: &dyn PowerCurve,
    dynamic: &[&DynamicModel],
    validation: &[Sample],
    horizons: &[f64],
    delta: f64,
    level: Option<f64>,
) -> Result<HorizonReport> {
    if horizons.is_empty() {
        return Err(Error::InvalidArgument("no horizons requested".into()));
    }
    let mut static_mse = Vec::new();
    let mut enhanced_mse = Vec::new();
    for &h in horizons {
        static_mse.push(mse_at_horizon(Predictor::Static(static_model), validation, h, delta)?);
        enhanced_mse.push(mse_at_horizon(Predictor::Static(enhanced), validation, h, delta)?);
    }
    let mut scores = Vec::new();
    for d in dynamic {
        let mse = horizons
            .iter()
            .map(|&h| mse_at_horizon(Predictor::Dynamic(d), validation, h, delta))
            .collect::<Result<Vec<_>>>()?;
        scores.push(DynamicScores { q1: d.arma.q1(), q2: d.arma.q2(), mse });
    }
    let coverage = match (level, dynamic.first()) {
        (Some(l), Some(d)) => Some(coverage_audit(d, validation, l)?),
        _ => None,
    };
    Ok(HorizonReport { horizons: horizons.to_vec(), static_mse, enhanced_mse, dynamic: scores, coverage })
}
