//! Seeded synthetic SCADA corpora with known ground truth.
//!
//! Power is generated as
//! `S(w |cos phi|^c_phi) (1 + c_t (T - t_bar)) + noise`, where `S` is a cubic
//! spline. Inside the noise band the noise is `sigma(w) r'_t` with `r'` a
//! unit-variance ARMA process that advances only at in-band steps; outside it
//! is `outside_scale * round(Z / 2)`, zero about two thirds of the time. Wind and power are recorded
//! to one decimal.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::curves::FittedModel;
use crate::dynamic::{band_contains, ArmaModel};
use crate::environmental::EnhancedModel;
use crate::scada::{clean, OperationalState, Sample, ScadaRecord, DEFAULT_IQR_K, SAMPLING_STEP_MINUTES};
use crate::{Error, Result, WindBin};

/// Knot vector of a fitted 17-function cubic spline for a 2 MW turbine.
pub const REFERENCE_KNOTS: [f64; 21] = [
    3.5, 3.5, 3.5, 3.5, 4.4247, 5.2668, 5.9855, 6.7569, 7.6994, 8.6481, 9.7265, 10.8994, 11.6831, 12.3575,
    12.9990, 13.6470, 14.3235, 15.0, 15.0, 15.0, 15.0,
];

/// Basis coefficients (kW) belonging to [`REFERENCE_KNOTS`].
pub const REFERENCE_COEFFICIENTS: [f64; 17] = [
    -8.0336698, -7.2559215, -23.865741, 78.529492, 156.55003, 272.98557, 452.80144, 690.69908, 1022.923,
    1400.7208, 1721.1444, 1921.2212, 1998.4378, 1992.549, 2005.308, 1997.8069, 2000.3969,
];

/// 2013-01-01T00:00Z in minutes since the Unix epoch.
pub const DEFAULT_START_MINUTES: i64 = 22_616_640;

/// Residual scale inside the noise band: `floor + amplitude sin^2(pi (w - lo) / (hi - lo))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaFn {
    pub band: (f64, f64),
    pub floor: f64,
    pub amplitude: f64,
}

impl SigmaFn {
    pub fn eval(&self, w: f64) -> f64 {
        let (lo, hi) = self.band;
        let s = libm::sin(core::f64::consts::PI * (w - lo) / (hi - lo));
        self.floor + self.amplitude * s * s
    }
}

/// Autoregression on log wind speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindProcess {
    pub log_mean: f64,
    /// Stationary standard deviation of log wind.
    pub log_sd: f64,
    pub phi: f64,
    pub max: f64,
}

/// Yearly and daily sinusoids plus white noise, °C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureProcess {
    pub mean: f64,
    pub seasonal_amplitude: f64,
    pub daily_amplitude: f64,
    pub noise_sd: f64,
}

/// Coefficients of the latent ARMA process; the innovation variance is set
/// so the process has unit marginal variance.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmaSpec {
    pub a: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    /// Records per season.
    pub n_samples: usize,
    pub start_minutes: i64,
    pub knots: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub c_phi: f64,
    pub c_t: f64,
    /// `None` switches all noise off.
    pub sigma: Option<SigmaFn>,
    /// Jump size of the noise outside the band, kW.
    pub outside_scale: f64,
    /// `None` makes the in-band noise white.
    pub arma: Option<ArmaSpec>,
    pub wind: WindProcess,
    pub temperature: TemperatureProcess,
    pub angle_sd_deg: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 0,
            n_samples: 10_000,
            start_minutes: DEFAULT_START_MINUTES,
            knots: REFERENCE_KNOTS.to_vec(),
            coefficients: REFERENCE_COEFFICIENTS.to_vec(),
            c_phi: 1.0,
            c_t: -0.005,
            sigma: Some(SigmaFn { band: (5.0, 14.0), floor: 8.0, amplitude: 30.0 }),
            outside_scale: 10.0,
            arma: Some(ArmaSpec { a: vec![0.5], c: vec![] }),
            wind: WindProcess { log_mean: libm::log(8.0), log_sd: 0.4, phi: 0.98, max: 30.0 },
            temperature: TemperatureProcess {
                mean: 8.0,
                seasonal_amplitude: 8.0,
                daily_amplitude: 3.0,
                noise_sd: 1.0,
            },
            angle_sd_deg: 6.0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidArgument("n_samples must be positive".into()));
        }
        FittedModel::spline(self.knots.clone(), self.coefficients.clone())?;
        if !(self.c_phi >= 0.0) {
            return Err(Error::InvalidArgument("c_phi must be nonnegative".into()));
        }
        if let Some(s) = &self.sigma {
            if !(s.band.0 < s.band.1 && s.floor > 0.0 && s.amplitude >= 0.0) {
                return Err(Error::InvalidArgument("sigma function must be positive on an ordered band".into()));
            }
        }
        if !(self.outside_scale >= 0.0) {
            return Err(Error::InvalidArgument("outside_scale must be nonnegative".into()));
        }
        if !(self.wind.phi.abs() < 1.0 && self.wind.log_sd >= 0.0 && self.wind.max > 0.0) {
            return Err(Error::InvalidArgument("wind process must be stationary".into()));
        }
        if let Some(spec) = &self.arma {
            self.latent_model(spec)?;
        }
        Ok(())
    }

    fn latent_model(&self, spec: &ArmaSpec) -> Result<ArmaModel> {
        let unit = ArmaModel::new(spec.a.clone(), spec.c.clone(), 0.0, 1.0)?;
        if !unit.is_stable() || !unit.is_invertible() {
            return Err(Error::InvalidArma("generator ARMA must be stable and invertible".into()));
        }
        let v = unit.stationary_variance();
        ArmaModel::new(spec.a.clone(), spec.c.clone(), 0.0, 1.0 / v)
    }
}

/// Everything needed to judge a fit on a generated corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub seed: u64,
    pub n_samples: usize,
    pub knots: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub c_phi: f64,
    pub c_t: f64,
    /// Mean training temperature used in the temperature factor.
    pub t_bar: f64,
    pub sigma: Option<SigmaFn>,
    pub outside_scale: f64,
    pub arma_a: Vec<f64>,
    pub arma_c: Vec<f64>,
    /// Innovation variance giving the latent process unit variance.
    pub sigma_eps2: f64,
}

impl GroundTruth {
    pub fn curve(&self) -> Result<FittedModel> {
        FittedModel::spline(self.knots.clone(), self.coefficients.clone())
    }

    pub fn enhanced(&self) -> Result<EnhancedModel> {
        Ok(EnhancedModel { base: self.curve()?, c_phi: self.c_phi, c_t: self.c_t, t_bar: self.t_bar })
    }

    pub fn band(&self) -> Option<(f64, f64)> {
        self.sigma.map(|s| s.band)
    }

    pub fn arma(&self) -> Option<ArmaModel> {
        if self.sigma_eps2 > 0.0 {
            ArmaModel::new(self.arma_a.clone(), self.arma_c.clone(), 0.0, self.sigma_eps2).ok()
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Season {
    pub records: Vec<ScadaRecord>,
    /// Latent `r'_t` at in-band steps.
    pub latent: Vec<Option<f64>>,
}

impl Season {
    pub fn samples(&self) -> Vec<Sample> {
        self.records.iter().filter_map(|r| r.to_sample()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub training: Season,
    pub validation: Season,
    pub truth: GroundTruth,
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn round1(x: f64) -> f64 {
    libm::round(x * 10.0) / 10.0
}

struct Exog {
    wind: Vec<f64>,
    angle: Vec<f64>,
    temperature: Vec<f64>,
}

fn exogenous<R: Rng>(cfg: &GeneratorConfig, offset: usize, rng: &mut R) -> Exog {
    let n = cfg.n_samples;
    let wp = cfg.wind;
    let innov_sd = wp.log_sd * libm::sqrt(1.0 - wp.phi * wp.phi);
    let mut x = wp.log_mean + wp.log_sd * normal(rng);
    let tp = cfg.temperature;
    let per_day = (24 * 60 / SAMPLING_STEP_MINUTES) as f64;
    let per_year = 365.0 * per_day;
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut out = Exog { wind: Vec::with_capacity(n), angle: Vec::with_capacity(n), temperature: Vec::with_capacity(n) };
    for i in 0..n {
        x = wp.log_mean + wp.phi * (x - wp.log_mean) + innov_sd * normal(rng);
        out.wind.push(round1(libm::exp(x).min(wp.max)));
        out.angle.push(round1(cfg.angle_sd_deg * normal(rng)).clamp(-180.0, 180.0));
        let t = (offset + i) as f64;
        let temp = tp.mean
            + tp.seasonal_amplitude * libm::sin(two_pi * t / per_year - 0.5 * core::f64::consts::PI)
            + tp.daily_amplitude * libm::sin(two_pi * t / per_day - 0.5 * core::f64::consts::PI)
            + tp.noise_sd * normal(rng);
        out.temperature.push(round1(temp));
    }
    out
}

/// Draws `n` values of a zero-mean ARMA process after a burn-in.
pub fn simulate_arma<R: Rng>(model: &ArmaModel, n: usize, rng: &mut R) -> Vec<f64> {
    let burn = 500;
    let mut latent = LatentArma::new(model);
    for _ in 0..burn {
        latent.step(rng);
    }
    (0..n).map(|_| latent.step(rng)).collect()
}

struct LatentArma<'a> {
    model: &'a ArmaModel,
    r: Vec<f64>,
    e: Vec<f64>,
    sd: f64,
}

impl<'a> LatentArma<'a> {
    fn new(model: &'a ArmaModel) -> Self {
        LatentArma { model, r: vec![0.0; model.q1()], e: vec![0.0; model.q2()], sd: libm::sqrt(model.sigma2) }
    }

    fn step<R: Rng>(&mut self, rng: &mut R) -> f64 {
        let eps = self.sd * normal(rng);
        let mut v = self.model.mu + eps;
        for (a, r) in self.model.a.iter().zip(&self.r) {
            v += a * r;
        }
        for (c, e) in self.model.c.iter().zip(&self.e) {
            v += c * e;
        }
        if !self.r.is_empty() {
            self.r.rotate_right(1);
            self.r[0] = v;
        }
        if !self.e.is_empty() {
            self.e.rotate_right(1);
            self.e[0] = eps;
        }
        v
    }
}

/// Generates a training and a validation season sharing one ground truth.
pub fn generate(config: &GeneratorConfig) -> Result<Corpus> {
    config.validate()?;
    let curve = FittedModel::spline(config.knots.clone(), config.coefficients.clone())?;
    let latent_model = match &config.arma {
        Some(spec) => Some(config.latent_model(spec)?),
        None => None,
    };
    let white = ArmaModel::new(vec![], vec![], 0.0, 1.0)?;
    let n = config.n_samples;

    let mut rng_train = ChaCha8Rng::seed_from_u64(config.seed);
    rng_train.set_stream(0);
    let mut rng_valid = ChaCha8Rng::seed_from_u64(config.seed);
    rng_valid.set_stream(1);

    let ex_train = exogenous(config, 0, &mut rng_train);
    let ex_valid = exogenous(config, n, &mut rng_valid);
    let t_bar = ex_train.temperature.iter().sum::<f64>() / n as f64;
    let truth_model = EnhancedModel { base: curve, c_phi: config.c_phi, c_t: config.c_t, t_bar };

    let season = |ex: &Exog, offset: usize, rng: &mut ChaCha8Rng| -> Result<Season> {
        let mut latent = LatentArma::new(latent_model.as_ref().unwrap_or(&white));
        for _ in 0..500 {
            latent.step(rng);
        }
        let mut records = Vec::with_capacity(n);
        let mut latent_out = Vec::with_capacity(n);
        for i in 0..n {
            let (w, phi, temp) = (ex.wind[i], ex.angle[i], ex.temperature[i]);
            let mean = truth_model.eval(w, phi, temp)?;
            let (noise, lat) = match &config.sigma {
                Some(sf) if band_contains(sf.band, w) => {
                    let r = latent.step(rng);
                    (sf.eval(w) * r, Some(r))
                }
                Some(_) => (config.outside_scale * libm::round(0.5 * normal(rng)), None),
                None => (0.0, None),
            };
            latent_out.push(lat);
            let timestamp = config.start_minutes + ((offset + i) as i64) * SAMPLING_STEP_MINUTES;
            records.push(ScadaRecord {
                timestamp,
                wind: Some(w),
                angle: Some(phi),
                temperature: Some(temp),
                power: Some(round1(mean + noise)),
                state: Some(OperationalState::Normal),
            });
        }
        Ok(Season { records, latent: latent_out })
    };

    let training = season(&ex_train, 0, &mut rng_train)?;
    let validation = season(&ex_valid, n, &mut rng_valid)?;
    let sigma_eps2 = latent_model.as_ref().map(|m| m.sigma2).unwrap_or(0.0);
    let truth = GroundTruth {
        seed: config.seed,
        n_samples: n,
        knots: config.knots.clone(),
        coefficients: config.coefficients.clone(),
        c_phi: config.c_phi,
        c_t: config.c_t,
        t_bar,
        sigma: config.sigma,
        outside_scale: config.outside_scale,
        arma_a: config.arma.as_ref().map(|s| s.a.clone()).unwrap_or_default(),
        arma_c: config.arma.as_ref().map(|s| s.c.clone()).unwrap_or_default(),
        sigma_eps2,
    };
    Ok(Corpus { training, validation, truth })
}

/// Samples from `p = sum_i b_i z^i + N(0, noise_sd^2)`, `z = (w - 9.25) / 5.75`,
/// with wind uniform on `[3.5, 15]` and both columns rounded to one decimal.
pub fn generate_polynomial(coefficients: &[f64], n: usize, noise_sd: f64, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let w = round1(rng.random_range(3.5..=15.0));
            let z = (w - 9.25) / 5.75;
            let p = coefficients.iter().rev().fold(0.0, |acc, b| acc * z + b);
            Sample {
                timestamp: DEFAULT_START_MINUTES + i as i64 * SAMPLING_STEP_MINUTES,
                wind: w,
                angle: 0.0,
                temperature: 0.0,
                power: round1(p + noise_sd * normal(&mut rng)),
            }
        })
        .collect()
}

/// Counts of each defect kind to inject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DefectSpec {
    /// Records deleted from the time grid.
    pub missing: usize,
    /// Records with one field blanked.
    pub incomplete: usize,
    /// Records flagged with a non-normal operational state.
    pub not_normal: usize,
    /// Records whose power is raised by 5000 kW.
    pub outliers: usize,
}

/// Offset added to the power of an injected outlier.
pub const OUTLIER_OFFSET: f64 = 5000.0;

/// Records per wind bin required before a record in that bin can carry a defect.
pub const DEFECT_MIN_BIN: usize = 30;

/// Cleans until no outliers remain and re-stamps the survivors onto a
/// contiguous grid, giving a base on which every cleaning rule counts zero.
pub fn defect_free_base(records: &[ScadaRecord], iqr_k: f64) -> Result<Vec<ScadaRecord>> {
    let mut current = records.to_vec();
    loop {
        let cleaned = crate::scada::clean(&current, iqr_k)?;
        let done = cleaned.report().outliers == 0 && cleaned.len() == current.len();
        let start = current.first().map(|r| r.timestamp).unwrap_or(DEFAULT_START_MINUTES);
        current = cleaned
            .samples()
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut r = ScadaRecord::from(s);
                r.timestamp = start + i as i64 * SAMPLING_STEP_MINUTES;
                r
            })
            .collect();
        if done {
            return Ok(current);
        }
    }
}

/// Applies the defects to disjoint records chosen at random among those in
/// wind bins with at least [`DEFECT_MIN_BIN`] records. Deleted records never
/// include the first or last record. The returned records clean to exactly the
/// requested counts.
pub fn inject_defects(records: &[ScadaRecord], spec: DefectSpec, seed: u64) -> Result<Vec<ScadaRecord>> {
    let n = records.len();
    let total = spec.missing + spec.incomplete + spec.not_normal + spec.outliers;
    if n < 2 || total > n - 2 {
        return Err(Error::InvalidArgument("more defects requested than interior records".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bin_count: BTreeMap<i32, usize> = BTreeMap::new();
    for r in records {
        if let Some(w) = r.wind {
            *bin_count.entry(WindBin::from_speed(w).0).or_default() += 1;
        }
    }
    let eligible = |r: &ScadaRecord| r.wind.is_some_and(|w| bin_count[&WindBin::from_speed(w).0] >= DEFECT_MIN_BIN);
    let mut idx: Vec<usize> = (1..n - 1).filter(|&i| eligible(&records[i])).collect();
    if total > idx.len() {
        return Err(Error::InvalidArgument("more defects requested than eligible records".into()));
    }
    // Removing records shifts bin quartiles, which can push a clean record past a
    // fence; each draw is audited with the cleaner and redrawn on a mismatch.
    for _ in 0..INJECT_ATTEMPTS {
        let Some(dirty) = draw_defects(records, &mut idx, &bin_count, spec, &mut rng) else { continue };
        let report = *clean(&dirty, DEFAULT_IQR_K)?.report();
        if report.missing == spec.missing
            && report.incomplete == spec.incomplete
            && report.not_normal == spec.not_normal
            && report.outliers == spec.outliers
        {
            return Ok(dirty);
        }
    }
    Err(Error::InvalidArgument("could not place the requested defects without disturbing other records".into()))
}

const INJECT_ATTEMPTS: usize = 200;

fn draw_defects(
    records: &[ScadaRecord],
    idx: &mut [usize],
    bin_count: &BTreeMap<i32, usize>,
    spec: DefectSpec,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<ScadaRecord>> {
    let n = records.len();
    for i in (1..idx.len()).rev() {
        let j = rng.random_range(0..=i);
        idx.swap(i, j);
    }
    let mut kind = vec![0u8; n];
    let mut cursor = 0;
    for (k, count) in [(1u8, spec.missing), (2, spec.incomplete), (3, spec.not_normal)] {
        for _ in 0..count {
            kind[idx[cursor]] = k;
            cursor += 1;
        }
    }
    // At most one outlier per ten records of a bin, leaving eight untouched.
    let mut untouched: BTreeMap<i32, usize> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        if kind[i] == 0 {
            if let Some(w) = r.wind {
                *untouched.entry(WindBin::from_speed(w).0).or_default() += 1;
            }
        }
    }
    let mut used: BTreeMap<i32, usize> = BTreeMap::new();
    let mut placed = 0;
    for &i in &idx[cursor..] {
        if placed == spec.outliers {
            break;
        }
        let r = &records[i];
        let (Some(w), Some(_)) = (r.wind, r.power) else { continue };
        let bin = WindBin::from_speed(w).0;
        let slot = used.entry(bin).or_default();
        let cap = (bin_count[&bin] / 10).max(1);
        if *slot < cap && untouched[&bin] >= 8 + *slot + 1 {
            *slot += 1;
            kind[i] = 4;
            placed += 1;
        }
    }
    if placed < spec.outliers {
        return None;
    }
    let mut out = Vec::with_capacity(n);
    for (i, r) in records.iter().enumerate() {
        let mut r = r.clone();
        match kind[i] {
            1 => continue,
            2 => match rng.random_range(0..4) {
                0 => r.wind = None,
                1 => r.angle = None,
                2 => r.temperature = None,
                _ => r.power = None,
            },
            3 => r.state = Some(if rng.random_bool(0.5) { OperationalState::Stopped } else { OperationalState::Derated }),
            4 => r.power = r.power.map(|p| p + OUTLIER_OFFSET),
            _ => {}
        }
        out.push(r);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scada::{clean, DEFAULT_IQR_K};

    fn small(seed: u64) -> GeneratorConfig {
        GeneratorConfig { seed, n_samples: 3000, ..GeneratorConfig::default() }
    }

    #[test]
    fn deterministic_for_a_seed() {
        let a = generate(&small(7)).unwrap();
        let b = generate(&small(7)).unwrap();
        assert_eq!(a, b);
        let c = generate(&small(8)).unwrap();
        assert_ne!(a.training.records, c.training.records);
    }

    #[test]
    fn noiseless_mode_lies_on_curve() {
        let cfg = GeneratorConfig { sigma: None, arma: None, ..small(3) };
        let corpus = generate(&cfg).unwrap();
        let truth = corpus.truth.enhanced().unwrap();
        for s in corpus.training.samples() {
            let p = truth.eval(s.wind, s.angle, s.temperature).unwrap();
            assert!((s.power - p).abs() <= 0.05 + 1e-9);
        }
    }

    #[test]
    fn quantized_to_one_decimal() {
        let corpus = generate(&small(1)).unwrap();
        for s in corpus.training.samples() {
            assert!((s.wind * 10.0 - libm::round(s.wind * 10.0)).abs() < 1e-9);
            assert!((s.power * 10.0 - libm::round(s.power * 10.0)).abs() < 1e-6);
        }
    }

    #[test]
    fn seasons_are_contiguous_and_disjoint() {
        let corpus = generate(&small(2)).unwrap();
        let last = corpus.training.records.last().unwrap().timestamp;
        let first = corpus.validation.records[0].timestamp;
        assert_eq!(first - last, SAMPLING_STEP_MINUTES);
        assert!((corpus.truth.t_bar
            - corpus.training.samples().iter().map(|s| s.temperature).sum::<f64>() / 3000.0)
            .abs()
            < 1e-9);
    }

    #[test]
    fn latent_process_has_unit_variance() {
        let cfg = GeneratorConfig::default();
        let m = cfg.latent_model(cfg.arma.as_ref().unwrap()).unwrap();
        assert!((m.stationary_variance() - 1.0).abs() < 1e-12);
        assert!((m.sigma2 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn injected_defects_are_counted() {
        let corpus = generate(&small(4)).unwrap();
        let base = defect_free_base(&corpus.training.records, DEFAULT_IQR_K).unwrap();
        assert_eq!(clean(&base, DEFAULT_IQR_K).unwrap().len(), base.len());
        let spec = DefectSpec { missing: 17, incomplete: 11, not_normal: 9, outliers: 13 };
        let dirty = inject_defects(&base, spec, 99).unwrap();
        let report = *clean(&dirty, DEFAULT_IQR_K).unwrap().report();
        assert_eq!(report.missing, 17);
        assert_eq!(report.incomplete, 11);
        assert_eq!(report.not_normal, 9);
        assert_eq!(report.outliers, 13);
    }

    #[test]
    fn polynomial_corpus_shape() {
        let d = generate_polynomial(&[1.0, 2.0], 500, 0.0, 5);
        assert_eq!(d.len(), 500);
        assert!(d.iter().all(|s| (3.5..=15.0).contains(&s.wind)));
        let s = &d[10];
        assert!((s.power - round1(1.0 + 2.0 * (s.wind - 9.25) / 5.75)).abs() < 1e-12);
    }

    #[test]
    fn invalid_configs_rejected() {
        let cfg = GeneratorConfig { arma: Some(ArmaSpec { a: vec![1.2], c: vec![] }), ..small(0) };
        assert!(generate(&cfg).is_err());
        let cfg = GeneratorConfig { n_samples: 0, ..small(0) };
        assert!(generate(&cfg).is_err());
    }
}
