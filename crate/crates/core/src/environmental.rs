//! Incidence-angle and temperature enhancement of a fitted static curve.

use crate::curves::FittedModel;
use crate::scada::Sample;
use crate::{Error, PowerCurve, Result};

/// Upper end of the search interval for the angle exponent.
pub const C_PHI_MAX: f64 = 3.0;

const COARSE_STEPS: usize = 30;
const GOLDEN_TOLERANCE: f64 = 1e-7;

/// `S(w |cos phi|^c_phi) (1 + c_t (T - t_bar))` with `S` a fitted static curve.
#[derive(Debug, Clone, PartialEq)]
pub struct EnhancedModel {
    pub base: FittedModel,
    pub c_phi: f64,
    pub c_t: f64,
    pub t_bar: f64,
}

impl EnhancedModel {
    /// The base curve unchanged: both coefficients zero.
    pub fn from_base(base: FittedModel, t_bar: f64) -> Self {
        EnhancedModel { base, c_phi: 0.0, c_t: 0.0, t_bar }
    }

    /// Power in kW; `angle` in degrees, `temperature` in °C.
    pub fn eval(&self, wind: f64, angle: f64, temperature: f64) -> Result<f64> {
        let w = effective_wind(wind, angle, self.c_phi);
        Ok(self.base.eval(w)? * (1.0 + self.c_t * (temperature - self.t_bar)))
    }
}

impl PowerCurve for EnhancedModel {
    fn predict(&self, wind: f64, angle: f64, temperature: f64) -> Result<f64> {
        self.eval(wind, angle, temperature)
    }
}

/// Wind component perpendicular to the rotor, `w |cos phi|^c`.
pub fn effective_wind(wind: f64, angle_deg: f64, c_phi: f64) -> f64 {
    if c_phi == 0.0 {
        return wind;
    }
    let c = libm::fabs(libm::cos(angle_deg.to_radians()));
    wind * libm::pow(c, c_phi)
}

pub fn eval_enhanced(model: &EnhancedModel, wind: f64, angle: f64, temperature: f64) -> Result<f64> {
    model.eval(wind, angle, temperature)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvMode {
    AngleOnly,
    TempOnly,
    Both,
}

impl EnvMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "angle" | "angle_only" | "angle-only" => Some(EnvMode::AngleOnly),
            "temp" | "temp_only" | "temp-only" | "temperature" => Some(EnvMode::TempOnly),
            "both" => Some(EnvMode::Both),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EnvMode::AngleOnly => "angle",
            EnvMode::TempOnly => "temp",
            EnvMode::Both => "both",
        }
    }

    fn uses_angle(self) -> bool {
        self != EnvMode::TempOnly
    }

    fn uses_temperature(self) -> bool {
        self != EnvMode::AngleOnly
    }
}

/// Which end of `[0, C_PHI_MAX]` the angle exponent stopped at, if the
/// objective still decreases beyond it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentalFit {
    pub model: EnhancedModel,
    pub mode: EnvMode,
    pub train_mse: f64,
    pub base_mse: f64,
    pub boundary: Option<Boundary>,
}

struct Objective<'a> {
    base: &'a FittedModel,
    samples: &'a [Sample],
    t_bar: f64,
    fit_temperature: bool,
}

impl Objective<'_> {
    /// Best `c_t` for a given `c_phi` and the resulting MSE.
    fn profile(&self, c_phi: f64) -> Result<(f64, f64)> {
        let n = self.samples.len() as f64;
        let mut base_vals = alloc::vec::Vec::with_capacity(self.samples.len());
        let (mut num, mut den) = (0.0, 0.0);
        for s in self.samples {
            let v = self.base.eval(effective_wind(s.wind, s.angle, c_phi))?;
            let sd = v * (s.temperature - self.t_bar);
            num += (s.power - v) * sd;
            den += sd * sd;
            base_vals.push(v);
        }
        let c_t = if self.fit_temperature && den > 0.0 { num / den } else { 0.0 };
        let mut ss = 0.0;
        for (s, v) in self.samples.iter().zip(&base_vals) {
            let e = s.power - v * (1.0 + c_t * (s.temperature - self.t_bar));
            ss += e * e;
        }
        Ok((c_t, ss / n))
    }

    fn mse(&self, c_phi: f64) -> Result<f64> {
        self.profile(c_phi).map(|p| p.1)
    }
}

fn minimize_angle(obj: &Objective<'_>) -> Result<f64> {
    let step = C_PHI_MAX / COARSE_STEPS as f64;
    let mut best = (0.0, obj.mse(0.0)?);
    for i in 1..=COARSE_STEPS {
        let c = i as f64 * step;
        let v = obj.mse(c)?;
        if v < best.1 {
            best = (c, v);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(0.0), (best.0 + step).min(C_PHI_MAX));
    let ratio = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = obj.mse(x1)?;
    let mut f2 = obj.mse(x2)?;
    while b - a > GOLDEN_TOLERANCE {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = obj.mse(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = obj.mse(x2)?;
        }
    }
    let mid = 0.5 * (a + b);
    let candidates = [(best.0, best.1), (mid, obj.mse(mid)?), (x1, f1), (x2, f2)];
    Ok(candidates.iter().fold(candidates[0], |acc, c| if c.1 < acc.1 { *c } else { acc }).0)
}

/// Estimates the coefficients the mode allows, holding the base curve fixed.
///
/// `t_bar` is the mean training temperature. The angle exponent is searched
/// on `[0, C_PHI_MAX]`; the temperature slope has a closed form for each
/// exponent.
pub fn fit_environmental(base: &FittedModel, samples: &[Sample], mode: EnvMode) -> Result<EnvironmentalFit> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("no samples for environmental fit"));
    }
    if samples.iter().any(|s| !(s.angle.is_finite() && s.temperature.is_finite())) {
        return Err(Error::NonFinite);
    }
    let n = samples.len() as f64;
    let t_bar = samples.iter().map(|s| s.temperature).sum::<f64>() / n;
    if mode.uses_temperature() && samples.iter().all(|s| s.temperature == samples[0].temperature) {
        return Err(Error::ConstantTemperature);
    }
    let obj = Objective { base, samples, t_bar, fit_temperature: mode.uses_temperature() };
    let base_mse = Objective { fit_temperature: false, ..obj }.mse(0.0)?;

    let (c_phi, c_t, mse) = if mode.uses_angle() {
        let angle_only = Objective { fit_temperature: false, ..obj };
        let c_angle = minimize_angle(&angle_only)?;
        let mut best = (c_angle, 0.0, angle_only.mse(c_angle)?);
        if mode == EnvMode::Both {
            let c_joint = minimize_angle(&obj)?;
            for c in [c_joint, c_angle, 0.0] {
                let (ct, m) = obj.profile(c)?;
                if m < best.2 {
                    best = (c, ct, m);
                }
            }
        }
        best
    } else {
        let (ct, m) = obj.profile(0.0)?;
        (0.0, ct, m)
    };

    let boundary = if mode.uses_angle() {
        let probe = 1e-4;
        let active = Objective { fit_temperature: mode.uses_temperature(), ..obj };
        if c_phi <= probe && active.mse(0.0)? < active.mse(probe)? {
            Some(Boundary::Lower)
        } else if c_phi >= C_PHI_MAX - probe && active.mse(C_PHI_MAX)? < active.mse(C_PHI_MAX - probe)? {
            Some(Boundary::Upper)
        } else {
            None
        }
    } else {
        None
    };

    Ok(EnvironmentalFit {
        model: EnhancedModel { base: base.clone(), c_phi, c_t, t_bar },
        mode,
        train_mse: mse,
        base_mse,
        boundary,
    })
}
