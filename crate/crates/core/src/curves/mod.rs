//! Static power-curve model classes under the constrained-input transform.
//!
//! Every model is estimated and evaluated on wind clamped to the support
//! `[3.5, 15]` m/s: below the support the curve takes its value at 3.5, between
//! 15 m/s and cut-out its value at 15, and at or above cut-out (25 m/s) the
//! output is zero.

use alloc::vec::Vec;
use core::fmt;

use crate::scada::Sample;
use crate::{Error, PowerCurve, Result};

pub mod logistic;
pub mod piecewise;
pub mod polynomial;
pub mod spline;

pub use spline::{bspline_basis, reallocate_knots, BSplineCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelClass {
    Logistic5PL,
    MStukel,
    PiecewiseLinear,
    Polynomial,
    BSpline,
}

impl ModelClass {
    pub const ALL: [ModelClass; 5] = [
        ModelClass::Logistic5PL,
        ModelClass::MStukel,
        ModelClass::PiecewiseLinear,
        ModelClass::Polynomial,
        ModelClass::BSpline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelClass::Logistic5PL => "logistic5pl",
            ModelClass::MStukel => "mstukel",
            ModelClass::PiecewiseLinear => "piecewise",
            ModelClass::Polynomial => "polynomial",
            ModelClass::BSpline => "spline",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        let n = name.trim().to_ascii_lowercase();
        match n.as_str() {
            "logistic5pl" | "5pl" | "logistic" => Some(ModelClass::Logistic5PL),
            "mstukel" | "stukel" => Some(ModelClass::MStukel),
            "piecewise" | "piecewise-linear" | "pwl" | "linear" => Some(ModelClass::PiecewiseLinear),
            "polynomial" | "poly" => Some(ModelClass::Polynomial),
            "spline" | "bspline" | "b-spline" => Some(ModelClass::BSpline),
            _ => None,
        }
    }

    /// Parameter count for the fixed-shape classes.
    pub fn fixed_order(self) -> Option<usize> {
        match self {
            ModelClass::Logistic5PL => Some(5),
            ModelClass::MStukel => Some(6),
            _ => None,
        }
    }
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Estimation support and cut-out speed, m/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
    pub cutout: f64,
}

impl Default for Support {
    fn default() -> Self {
        Support { lo: 3.5, hi: 15.0, cutout: 25.0 }
    }
}

impl Support {
    pub fn validate(&self) -> Result<()> {
        if self.lo < self.hi && self.hi < self.cutout && self.lo.is_finite() && self.cutout.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(alloc::format!("invalid support {self:?}")))
        }
    }
}

/// A model class plus its order.
///
/// `order` is the segment count (piecewise linear), degree (polynomial) or
/// number of basis functions (spline). Logistic classes have a fixed order
/// equal to their parameter count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub class: ModelClass,
    pub order: usize,
    pub support: Support,
}

impl ModelSpec {
    pub fn new(class: ModelClass, order: usize) -> Result<Self> {
        let order = class.fixed_order().unwrap_or(order);
        if order == 0 {
            return Err(Error::InvalidArgument("model order must be at least 1".into()));
        }
        if class == ModelClass::BSpline && order < 4 {
            return Err(Error::InvalidArgument("a cubic spline needs at least 4 basis functions".into()));
        }
        Ok(ModelSpec { class, order, support: Support::default() })
    }

    pub fn with_support(mut self, support: Support) -> Result<Self> {
        support.validate()?;
        self.support = support;
        Ok(self)
    }

    /// Number of free entries of `theta` for this spec.
    pub fn n_params(&self) -> usize {
        match self.class {
            ModelClass::Logistic5PL => 5,
            ModelClass::MStukel => 6,
            ModelClass::PiecewiseLinear | ModelClass::Polynomial => self.order + 1,
            ModelClass::BSpline => self.order,
        }
    }
}

/// Result of the input clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstrainedWind {
    pub wind: f64,
    /// At or above cut-out: the model output is forced to zero.
    pub cut_out: bool,
}

pub fn constrain_input(wind: f64, support: &Support) -> Result<ConstrainedWind> {
    if wind.is_nan() || wind < 0.0 {
        return Err(Error::NegativeWind(wind));
    }
    let c = if wind < support.lo {
        ConstrainedWind { wind: support.lo, cut_out: false }
    } else if wind < support.hi {
        ConstrainedWind { wind, cut_out: false }
    } else if wind < support.cutout {
        ConstrainedWind { wind: support.hi, cut_out: false }
    } else {
        ConstrainedWind { wind, cut_out: true }
    };
    Ok(c)
}

/// Polynomial rescaling constants: sample means and standard deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyScaling {
    pub power_mean: f64,
    pub wind_mean: f64,
    pub power_scale: f64,
    pub wind_scale: f64,
}

/// Class-specific data that is not part of `theta`.
#[derive(Debug, Clone, PartialEq)]
pub enum Auxiliary {
    None,
    Splits(Vec<f64>),
    Scaling(PolyScaling),
    Knots(Vec<f64>),
}

/// A model with estimated parameters.
///
/// `theta` layouts:
/// * 5-PL: `[t1, t2, t3, t4, t5]` in `t5 + (t1 - t5) / (1 + (w / t2)^t3)^t4`
/// * mStukel: `[t1, t2, t3, t4, t_lo, t_hi]`
/// * piecewise linear: `[height, slope_0, .., slope_{m-1}]`
/// * polynomial: `[c_0, .., c_m]` on the rescaled argument
/// * spline: basis coefficients `alpha_1..alpha_m`
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    spec: ModelSpec,
    theta: Vec<f64>,
    aux: Auxiliary,
    train_mse: f64,
}

impl FittedModel {
    /// Assembles a model from stored parts, checking the layout is consistent.
    pub fn from_parts(spec: ModelSpec, theta: Vec<f64>, aux: Auxiliary, train_mse: f64) -> Result<Self> {
        spec.support.validate()?;
        if theta.len() != spec.n_params() {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} model of order {} needs {} parameters, got {}",
                spec.class,
                spec.order,
                spec.n_params(),
                theta.len()
            )));
        }
        let aux_ok = match (&spec.class, &aux) {
            (ModelClass::Logistic5PL | ModelClass::MStukel, Auxiliary::None) => true,
            (ModelClass::PiecewiseLinear, Auxiliary::Splits(s)) => {
                s.len() == spec.order && s.windows(2).all(|w| w[0] <= w[1])
            }
            (ModelClass::Polynomial, Auxiliary::Scaling(_)) => true,
            (ModelClass::BSpline, Auxiliary::Knots(k)) => {
                spline::validate_knots(k)?;
                k.len() == spec.order + 4
            }
            _ => false,
        };
        if !aux_ok {
            return Err(Error::InvalidArgument(alloc::format!(
                "auxiliary data does not match {} model of order {}",
                spec.class,
                spec.order
            )));
        }
        Ok(FittedModel { spec, theta, aux, train_mse })
    }

    /// A cubic spline with given knots and coefficients on the default support.
    pub fn spline(knots: Vec<f64>, coefficients: Vec<f64>) -> Result<Self> {
        let spec = ModelSpec::new(ModelClass::BSpline, coefficients.len())?;
        FittedModel::from_parts(spec, coefficients, Auxiliary::Knots(knots), f64::NAN)
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn class(&self) -> ModelClass {
        self.spec.class
    }

    pub fn order(&self) -> usize {
        self.spec.order
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn aux(&self) -> &Auxiliary {
        &self.aux
    }

    pub fn train_mse(&self) -> f64 {
        self.train_mse
    }

    pub fn n_params(&self) -> usize {
        self.theta.len()
    }

    pub fn knots(&self) -> Option<&[f64]> {
        match &self.aux {
            Auxiliary::Knots(k) => Some(k),
            _ => None,
        }
    }

    /// Power in kW at wind speed `wind` m/s.
    pub fn eval(&self, wind: f64) -> Result<f64> {
        if self.theta.iter().any(|v| v.is_nan()) {
            return Err(Error::NanParameter);
        }
        let c = constrain_input(wind, &self.spec.support)?;
        if c.cut_out {
            return Ok(0.0);
        }
        Ok(self.eval_raw(c.wind))
    }

    /// Class formula without the clamp; `wind` must lie in the support.
    pub(crate) fn eval_raw(&self, wind: f64) -> f64 {
        let t = &self.theta;
        match (&self.spec.class, &self.aux) {
            (ModelClass::Logistic5PL, _) => logistic::five_pl(t, wind),
            (ModelClass::MStukel, _) => logistic::mstukel(t, wind, &self.spec.support),
            (ModelClass::PiecewiseLinear, Auxiliary::Splits(s)) => piecewise::eval(t, s, wind),
            (ModelClass::Polynomial, Auxiliary::Scaling(sc)) => polynomial::eval(t, sc, wind),
            (ModelClass::BSpline, Auxiliary::Knots(k)) => spline::eval(k, t, 3, wind),
            _ => unreachable!("layout checked at construction"),
        }
    }

    pub(crate) fn with_train_mse(mut self, train_mse: f64) -> Self {
        self.train_mse = train_mse;
        self
    }
}

impl PowerCurve for FittedModel {
    fn predict(&self, wind: f64, _angle: f64, _temperature: f64) -> Result<f64> {
        self.eval(wind)
    }
}

/// Training data after the constrained-input transform: winds clamped into
/// the support, records at or above cut-out dropped.
pub fn constrained_samples(samples: &[Sample], support: &Support) -> Result<Vec<Sample>> {
    let mut out = Vec::with_capacity(samples.len());
    for s in samples {
        let c = constrain_input(s.wind, support)?;
        if !c.cut_out {
            out.push(Sample { wind: c.wind, ..*s });
        }
    }
    Ok(out)
}

/// Least-squares fit of `spec` to `samples`.
pub fn fit(spec: &ModelSpec, samples: &[Sample]) -> Result<FittedModel> {
    spec.support.validate()?;
    let data = constrained_samples(samples, &spec.support)?;
    if data.is_empty() {
        return Err(Error::EmptyInput("no samples below cut-out"));
    }
    let xs: Vec<f64> = data.iter().map(|s| s.wind).collect();
    let ys: Vec<f64> = data.iter().map(|s| s.power).collect();
    let model = match spec.class {
        ModelClass::Logistic5PL | ModelClass::MStukel => logistic::fit(spec, &xs, &ys)?,
        ModelClass::PiecewiseLinear => {
            piecewise::fit_with_splits(spec, piecewise::equidistant_splits(spec), &xs, &ys)?
        }
        ModelClass::Polynomial => polynomial::fit(spec, &xs, &ys)?,
        ModelClass::BSpline => spline::fit(spec, &xs, &ys)?,
    };
    let mse = training_mse(&model, &xs, &ys);
    Ok(model.with_train_mse(mse))
}

pub(crate) fn training_mse(model: &FittedModel, xs: &[f64], ys: &[f64]) -> f64 {
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let e = y - model.eval_raw(x);
            e * e
        })
        .sum();
    ss / xs.len() as f64
}
