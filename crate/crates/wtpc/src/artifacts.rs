//! JSON artifacts exchanged between pipeline steps.
//!
//! Floats are written in the shortest form that parses back to the same
//! `f64`, so every artifact round-trips bit-exactly.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use wtpc_core::curves::{Auxiliary, FittedModel, ModelClass, ModelSpec, PolyScaling, Support};
use wtpc_core::dynamic::{ArmaModel, DynamicModel};
use wtpc_core::environmental::{Boundary, EnhancedModel, EnvironmentalFit};
use wtpc_core::residuals::{ResidualProfile, SigmaBin, SigmaProfile};
use wtpc_core::scada::CleaningReport;
use wtpc_core::synthetic::{GroundTruth, SigmaFn};
use wtpc_core::WindBin;

use crate::error::{AppError, AppResult};

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> AppResult<()> {
    use std::io::Write;
    let mut out = crate::io::create(path)?;
    let text = serde_json::to_string_pretty(value).expect("artifact serializes");
    writeln!(out, "{text}").and_then(|_| out.flush()).map_err(|e| AppError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> AppResult<T> {
    if !path.exists() {
        return Err(AppError::MissingArtifact(path.to_path_buf()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| AppError::InvalidArtifact { path: path.to_path_buf(), message: e.to_string() })
}

fn invalid(path: &Path, e: impl std::fmt::Display) -> AppError {
    AppError::InvalidArtifact { path: path.to_path_buf(), message: e.to_string() }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportDto {
    pub lo: f64,
    pub hi: f64,
    pub cutout: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingDto {
    pub power_mean: f64,
    pub wind_mean: f64,
    pub power_scale: f64,
    pub wind_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxDto {
    None,
    Splits(Vec<f64>),
    Scaling(ScalingDto),
    Knots(Vec<f64>),
}

/// A fitted static curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub class: String,
    pub m: usize,
    pub n_params: usize,
    pub theta: Vec<f64>,
    pub aux: AuxDto,
    pub train_mse: Option<f64>,
    pub support: SupportDto,
}

impl From<&FittedModel> for ModelArtifact {
    fn from(m: &FittedModel) -> Self {
        let s = m.spec().support;
        let aux = match m.aux() {
            Auxiliary::None => AuxDto::None,
            Auxiliary::Splits(v) => AuxDto::Splits(v.clone()),
            Auxiliary::Knots(v) => AuxDto::Knots(v.clone()),
            Auxiliary::Scaling(p) => AuxDto::Scaling(ScalingDto {
                power_mean: p.power_mean,
                wind_mean: p.wind_mean,
                power_scale: p.power_scale,
                wind_scale: p.wind_scale,
            }),
        };
        ModelArtifact {
            class: m.class().name().to_string(),
            m: m.order(),
            n_params: m.n_params(),
            theta: m.theta().to_vec(),
            aux,
            train_mse: finite(m.train_mse()),
            support: SupportDto { lo: s.lo, hi: s.hi, cutout: s.cutout },
        }
    }
}

impl ModelArtifact {
    pub fn to_model(&self, path: &Path) -> AppResult<FittedModel> {
        let class = ModelClass::parse(&self.class).ok_or_else(|| invalid(path, format!("unknown class {:?}", self.class)))?;
        let support = Support { lo: self.support.lo, hi: self.support.hi, cutout: self.support.cutout };
        let spec = ModelSpec::new(class, self.m).and_then(|s| s.with_support(support)).map_err(|e| invalid(path, e))?;
        let aux = match &self.aux {
            AuxDto::None => Auxiliary::None,
            AuxDto::Splits(v) => Auxiliary::Splits(v.clone()),
            AuxDto::Knots(v) => Auxiliary::Knots(v.clone()),
            AuxDto::Scaling(p) => Auxiliary::Scaling(PolyScaling {
                power_mean: p.power_mean,
                wind_mean: p.wind_mean,
                power_scale: p.power_scale,
                wind_scale: p.wind_scale,
            }),
        };
        FittedModel::from_parts(spec, self.theta.clone(), aux, self.train_mse.unwrap_or(f64::NAN))
            .map_err(|e| invalid(path, e))
    }
}

/// A static curve plus its angle and temperature coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnhancedArtifact {
    /// Path of the base model file the coefficients were fitted on.
    pub base_ref: String,
    pub base: ModelArtifact,
    pub mode: String,
    pub c_phi: f64,
    #[serde(rename = "c_T")]
    pub c_t: f64,
    #[serde(rename = "T_bar")]
    pub t_bar: f64,
    pub train_mse: Option<f64>,
    pub base_mse: Option<f64>,
    pub boundary: Option<String>,
}

impl EnhancedArtifact {
    pub fn from_fit(fit: &EnvironmentalFit, base_ref: &str) -> Self {
        EnhancedArtifact {
            base_ref: base_ref.to_string(),
            base: ModelArtifact::from(&fit.model.base),
            mode: fit.mode.name().to_string(),
            c_phi: fit.model.c_phi,
            c_t: fit.model.c_t,
            t_bar: fit.model.t_bar,
            train_mse: finite(fit.train_mse),
            base_mse: finite(fit.base_mse),
            boundary: fit.boundary.map(|b| match b {
                Boundary::Lower => "lower".to_string(),
                Boundary::Upper => "upper".to_string(),
            }),
        }
    }

    pub fn to_model(&self, path: &Path) -> AppResult<EnhancedModel> {
        Ok(EnhancedModel { base: self.base.to_model(path)?, c_phi: self.c_phi, c_t: self.c_t, t_bar: self.t_bar })
    }
}

/// Reads either an enhanced model or a bare static model, which is wrapped
/// with zero coefficients.
pub fn read_enhanced_artifact(path: &Path) -> AppResult<EnhancedArtifact> {
    let value: serde_json::Value = read_json(path)?;
    if value.get("base").is_some() {
        serde_json::from_value(value).map_err(|e| invalid(path, e))
    } else {
        let base: ModelArtifact = serde_json::from_value(value).map_err(|e| invalid(path, e))?;
        Ok(EnhancedArtifact {
            base_ref: path.display().to_string(),
            base,
            mode: "none".to_string(),
            c_phi: 0.0,
            c_t: 0.0,
            t_bar: 0.0,
            train_mse: None,
            base_mse: None,
            boundary: None,
        })
    }
}

pub fn read_enhanced(path: &Path) -> AppResult<EnhancedModel> {
    read_enhanced_artifact(path)?.to_model(path)
}

pub fn read_model(path: &Path) -> AppResult<FittedModel> {
    read_json::<ModelArtifact>(path)?.to_model(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmaArtifact {
    pub q1: usize,
    pub q2: usize,
    pub a: Vec<f64>,
    pub c: Vec<f64>,
    pub mu: f64,
    pub sigma_eps2: f64,
}

impl From<&ArmaModel> for ArmaArtifact {
    fn from(m: &ArmaModel) -> Self {
        ArmaArtifact { q1: m.q1(), q2: m.q2(), a: m.a.clone(), c: m.c.clone(), mu: m.mu, sigma_eps2: m.sigma2 }
    }
}

impl ArmaArtifact {
    pub fn to_model(&self, path: &Path) -> AppResult<ArmaModel> {
        if self.a.len() != self.q1 || self.c.len() != self.q2 {
            return Err(invalid(path, "coefficient counts do not match q1/q2"));
        }
        ArmaModel::new(self.a.clone(), self.c.clone(), self.mu, self.sigma_eps2).map_err(|e| invalid(path, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileBinDto {
    pub wind: f64,
    pub sigma: f64,
    pub n: usize,
    pub interpolated: bool,
    pub ad_p: Option<f64>,
}

/// Residual scale per wind bin and the Gaussian band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileArtifact {
    pub alpha: f64,
    pub g_lo: f64,
    pub g_hi: f64,
    pub bins: Vec<ProfileBinDto>,
}

impl From<&ResidualProfile> for ProfileArtifact {
    fn from(p: &ResidualProfile) -> Self {
        let bins = p
            .sigma
            .bins()
            .iter()
            .map(|(bin, b)| ProfileBinDto {
                wind: bin.speed(),
                sigma: b.sigma,
                n: b.count,
                interpolated: b.interpolated,
                ad_p: p.ad_pvalues.get(bin).copied(),
            })
            .collect();
        ProfileArtifact { alpha: p.alpha, g_lo: p.g_lo, g_hi: p.g_hi, bins }
    }
}

impl ProfileArtifact {
    pub fn to_profile(&self, path: &Path) -> AppResult<ResidualProfile> {
        let mut bins = BTreeMap::new();
        let mut ad = BTreeMap::new();
        for b in &self.bins {
            let key = WindBin::from_speed(b.wind);
            bins.insert(key, SigmaBin { count: b.n, sigma: b.sigma, interpolated: b.interpolated });
            if let Some(p) = b.ad_p {
                ad.insert(key, p);
            }
        }
        let sigma = SigmaProfile::from_bins(bins).map_err(|e| invalid(path, e))?;
        if !(self.g_lo < self.g_hi) {
            return Err(invalid(path, "band bounds are not ordered"));
        }
        Ok(ResidualProfile { sigma, g_lo: self.g_lo, g_hi: self.g_hi, ad_pvalues: ad, alpha: self.alpha })
    }
}

/// Everything `forecast` and `evaluate` need from a fitted dynamic model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicArtifact {
    pub enhanced: EnhancedArtifact,
    pub profile: ProfileArtifact,
    pub arma: ArmaArtifact,
    pub sigma_e2: f64,
}

impl DynamicArtifact {
    pub fn new(model: &DynamicModel, enhanced: EnhancedArtifact) -> Self {
        DynamicArtifact {
            enhanced,
            profile: ProfileArtifact::from(&model.profile),
            arma: ArmaArtifact::from(&model.arma),
            sigma_e2: model.sigma_e2,
        }
    }

    pub fn to_model(&self, path: &Path) -> AppResult<DynamicModel> {
        Ok(DynamicModel {
            enhanced: self.enhanced.to_model(path)?,
            profile: self.profile.to_profile(path)?,
            arma: self.arma.to_model(path)?,
            sigma_e2: self.sigma_e2,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportArtifact {
    pub raw: usize,
    pub missing: usize,
    pub incomplete: usize,
    pub not_normal: usize,
    pub na_in_nno: usize,
    pub outliers: usize,
    pub retained: usize,
    pub proportion: f64,
}

impl From<&CleaningReport> for ReportArtifact {
    fn from(r: &CleaningReport) -> Self {
        ReportArtifact {
            raw: r.raw,
            missing: r.missing,
            incomplete: r.incomplete,
            not_normal: r.not_normal,
            na_in_nno: r.na_in_nno(),
            outliers: r.outliers,
            retained: r.retained,
            proportion: r.proportion(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaFnDto {
    pub band: (f64, f64),
    pub floor: f64,
    pub amplitude: f64,
}

/// Generator ground truth, written next to each simulated corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthArtifact {
    pub seed: u64,
    pub n_samples: usize,
    pub knots: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub c_phi: f64,
    #[serde(rename = "c_T")]
    pub c_t: f64,
    #[serde(rename = "T_bar")]
    pub t_bar: f64,
    pub sigma: Option<SigmaFnDto>,
    pub outside_scale: f64,
    pub arma_a: Vec<f64>,
    pub arma_c: Vec<f64>,
    pub sigma_eps2: f64,
}

impl From<&GroundTruth> for TruthArtifact {
    fn from(t: &GroundTruth) -> Self {
        TruthArtifact {
            seed: t.seed,
            n_samples: t.n_samples,
            knots: t.knots.clone(),
            coefficients: t.coefficients.clone(),
            c_phi: t.c_phi,
            c_t: t.c_t,
            t_bar: t.t_bar,
            sigma: t.sigma.map(|s| SigmaFnDto { band: s.band, floor: s.floor, amplitude: s.amplitude }),
            outside_scale: t.outside_scale,
            arma_a: t.arma_a.clone(),
            arma_c: t.arma_c.clone(),
            sigma_eps2: t.sigma_eps2,
        }
    }
}

impl From<&TruthArtifact> for GroundTruth {
    fn from(t: &TruthArtifact) -> Self {
        GroundTruth {
            seed: t.seed,
            n_samples: t.n_samples,
            knots: t.knots.clone(),
            coefficients: t.coefficients.clone(),
            c_phi: t.c_phi,
            c_t: t.c_t,
            t_bar: t.t_bar,
            sigma: t.sigma.map(|s| SigmaFn { band: s.band, floor: s.floor, amplitude: s.amplitude }),
            outside_scale: t.outside_scale,
            arma_a: t.arma_a.clone(),
            arma_c: t.arma_c.clone(),
            sigma_eps2: t.sigma_eps2,
        }
    }
}

pub fn read_truth(path: &Path) -> AppResult<GroundTruth> {
    Ok(GroundTruth::from(&read_json::<TruthArtifact>(path)?))
}
