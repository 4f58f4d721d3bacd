//! Residual scale per wind bin, rescaled residuals and the Gaussian band.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::scada::Sample;
use crate::stats::{anderson_darling, AD_MIN_SAMPLES};
use crate::{Error, PowerCurve, Result, WindBin};

/// Bins with fewer residuals than this take their scale from neighbours.
pub const DEFAULT_MIN_BIN_COUNT: usize = 30;
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Wind grid searched for the Gaussian band, in tenths of m/s.
pub const BAND_GRID: (i32, i32) = (35, 150);

/// `p - model(w, phi, T)` for every sample, in time order.
pub fn residuals<M: PowerCurve + ?Sized>(model: &M, samples: &[Sample]) -> Result<Vec<f64>> {
    samples.iter().map(|s| Ok(s.power - model.predict(s.wind, s.angle, s.temperature)?)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaBin {
    pub count: usize,
    pub sigma: f64,
    /// True when `count` was below the threshold and `sigma` was interpolated.
    pub interpolated: bool,
}

/// Root mean square residual per quantized wind value.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaProfile {
    bins: BTreeMap<WindBin, SigmaBin>,
}

impl SigmaProfile {
    pub fn from_bins(bins: BTreeMap<WindBin, SigmaBin>) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::EmptyInput("empty sigma profile"));
        }
        if bins.values().any(|b| !(b.sigma >= 0.0) || !b.sigma.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(SigmaProfile { bins })
    }

    pub fn bins(&self) -> &BTreeMap<WindBin, SigmaBin> {
        &self.bins
    }

    pub fn get(&self, bin: WindBin) -> Option<&SigmaBin> {
        self.bins.get(&bin)
    }

    /// Scale at `wind`: the bin's own value when present, otherwise linear
    /// interpolation between the neighbouring bins (constant beyond the ends).
    pub fn sigma_at(&self, wind: f64) -> f64 {
        let bin = WindBin::from_speed(wind);
        if let Some(b) = self.bins.get(&bin) {
            return b.sigma;
        }
        let below = self.bins.range(..bin).next_back();
        let above = self.bins.range(bin..).next();
        match (below, above) {
            (Some((k0, b0)), Some((k1, b1))) => {
                let t = (bin.0 - k0.0) as f64 / (k1.0 - k0.0) as f64;
                b0.sigma + t * (b1.sigma - b0.sigma)
            }
            (Some((_, b)), None) | (None, Some((_, b))) => b.sigma,
            (None, None) => unreachable!("profile is never empty"),
        }
    }
}

/// `sigma_w^2 = mean(r^2)` within each bin; bins with fewer than `min_count`
/// residuals are interpolated from the nearest well-populated bins.
pub fn sigma_profile(r: &[f64], samples: &[Sample], min_count: usize) -> Result<SigmaProfile> {
    if r.is_empty() {
        return Err(Error::EmptyInput("empty residual series"));
    }
    if r.len() != samples.len() {
        return Err(Error::InvalidArgument("residuals and samples differ in length".into()));
    }
    let mut acc: BTreeMap<WindBin, (usize, f64)> = BTreeMap::new();
    for (e, s) in r.iter().zip(samples) {
        let a = acc.entry(s.wind_bin()).or_insert((0, 0.0));
        a.0 += 1;
        a.1 += e * e;
    }
    let min_count = min_count.max(1);
    let anchors: Vec<(i32, f64)> = acc
        .iter()
        .filter(|(_, (n, _))| *n >= min_count)
        .map(|(k, (n, ss))| (k.0, libm::sqrt(ss / *n as f64)))
        .collect();
    if anchors.is_empty() {
        return Err(Error::InsufficientSamples { given: acc.values().map(|a| a.0).max().unwrap_or(0), needed: min_count });
    }
    let bins = acc
        .into_iter()
        .map(|(k, (n, ss))| {
            let entry = if n >= min_count {
                SigmaBin { count: n, sigma: libm::sqrt(ss / n as f64), interpolated: false }
            } else {
                SigmaBin { count: n, sigma: interpolate(&anchors, k.0), interpolated: true }
            };
            (k, entry)
        })
        .collect();
    Ok(SigmaProfile { bins })
}

fn interpolate(anchors: &[(i32, f64)], key: i32) -> f64 {
    let idx = anchors.partition_point(|a| a.0 < key);
    if idx == 0 {
        return anchors[0].1;
    }
    if idx == anchors.len() {
        return anchors[idx - 1].1;
    }
    let (k0, s0) = anchors[idx - 1];
    let (k1, s1) = anchors[idx];
    s0 + (key - k0) as f64 / (k1 - k0) as f64 * (s1 - s0)
}

/// `r' = r / sigma_w` using each sample's quantized wind.
pub fn rescale(r: &[f64], profile: &SigmaProfile, samples: &[Sample]) -> Result<Vec<f64>> {
    if r.len() != samples.len() {
        return Err(Error::InvalidArgument("residuals and samples differ in length".into()));
    }
    r.iter()
        .zip(samples)
        .map(|(e, s)| {
            let sigma = profile.sigma_at(s.wind);
            if sigma > 0.0 {
                Ok(e / sigma)
            } else {
                Err(Error::ZeroSigma(s.wind_bin()))
            }
        })
        .collect()
}

/// Per-bin normality p-values and the chosen band.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBand {
    pub g_lo: f64,
    pub g_hi: f64,
    /// Anderson-Darling p-value for every grid bin with enough samples.
    pub p_values: BTreeMap<WindBin, f64>,
}

impl GaussianBand {
    pub fn contains(&self, wind: f64) -> bool {
        let b = WindBin::from_speed(wind);
        b >= WindBin::from_speed(self.g_lo) && b <= WindBin::from_speed(self.g_hi)
    }
}

/// Longest run of consecutive grid bins whose rescaled residuals pass a
/// case-0 Anderson-Darling test at level `alpha`.
///
/// A bin with fewer than eight samples (or none) ends a run. Ties between
/// equally long runs go to the lower wind range.
pub fn gaussian_band(r_scaled: &[f64], winds: &[f64], alpha: f64) -> Result<GaussianBand> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(alloc::format!("alpha must be in (0, 1), got {alpha}")));
    }
    if r_scaled.len() != winds.len() {
        return Err(Error::InvalidArgument("residuals and winds differ in length".into()));
    }
    let mut groups: BTreeMap<WindBin, Vec<f64>> = BTreeMap::new();
    for (r, w) in r_scaled.iter().zip(winds) {
        let b = WindBin::from_speed(*w);
        if b.0 >= BAND_GRID.0 && b.0 <= BAND_GRID.1 {
            groups.entry(b).or_default().push(*r);
        }
    }
    let mut p_values = BTreeMap::new();
    for (b, xs) in &groups {
        if xs.len() >= AD_MIN_SAMPLES {
            p_values.insert(*b, anderson_darling(xs)?.p_value);
        }
    }
    let mut best: Option<(i32, i32)> = None;
    let mut start: Option<i32> = None;
    for k in BAND_GRID.0..=BAND_GRID.1 + 1 {
        let pass = k <= BAND_GRID.1 && p_values.get(&WindBin(k)).is_some_and(|p| *p >= alpha);
        match (pass, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                let len = k - s;
                if best.is_none_or(|(b0, b1)| len > b1 - b0 + 1) {
                    best = Some((s, k - 1));
                }
                start = None;
            }
            _ => {}
        }
    }
    match best {
        Some((lo, hi)) if hi > lo => {
            Ok(GaussianBand { g_lo: WindBin(lo).speed(), g_hi: WindBin(hi).speed(), p_values })
        }
        _ => Err(Error::NoGaussianBand(alpha)),
    }
}

/// Scale profile plus Gaussian band of a fitted model's residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualProfile {
    pub sigma: SigmaProfile,
    pub g_lo: f64,
    pub g_hi: f64,
    pub ad_pvalues: BTreeMap<WindBin, f64>,
    pub alpha: f64,
}

impl ResidualProfile {
    pub fn build<M: PowerCurve + ?Sized>(
        model: &M,
        samples: &[Sample],
        alpha: f64,
        min_count: usize,
    ) -> Result<Self> {
        let r = residuals(model, samples)?;
        let sigma = sigma_profile(&r, samples, min_count)?;
        // Bins with zero scale cannot be rescaled; they never join the band.
        let mut scaled = Vec::with_capacity(r.len());
        let mut winds = Vec::with_capacity(r.len());
        for (e, s) in r.iter().zip(samples) {
            let sd = sigma.sigma_at(s.wind);
            if sd > 0.0 {
                scaled.push(e / sd);
                winds.push(s.wind);
            }
        }
        let band = gaussian_band(&scaled, &winds, alpha)?;
        Ok(ResidualProfile { sigma, g_lo: band.g_lo, g_hi: band.g_hi, ad_pvalues: band.p_values, alpha })
    }

    pub fn in_band(&self, wind: f64) -> bool {
        let b = WindBin::from_speed(wind);
        b >= WindBin::from_speed(self.g_lo) && b <= WindBin::from_speed(self.g_hi)
    }

    pub fn sigma_at(&self, wind: f64) -> f64 {
        self.sigma.sigma_at(wind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::normal_quantile;
    use alloc::vec;

    fn s(wind: f64, power: f64) -> Sample {
        Sample { timestamp: 0, wind, angle: 0.0, temperature: 0.0, power }
    }

    struct Constant(f64);
    impl PowerCurve for Constant {
        fn predict(&self, _: f64, _: f64, _: f64) -> Result<f64> {
            Ok(self.0)
        }
    }

    #[test]
    fn residual_arithmetic() {
        assert_eq!(residuals(&Constant(90.0), &[s(5.0, 100.0)]).unwrap(), vec![10.0]);
        assert_eq!(residuals(&Constant(4.0), &[s(5.0, 4.0), s(6.0, 4.0)]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn two_point_bin() {
        let data = [s(5.0, 0.0), s(5.0, 0.0)];
        let p = sigma_profile(&[3.0, -3.0], &data, 2).unwrap();
        assert_eq!(p.get(WindBin(50)).unwrap().sigma, 3.0);
        assert_eq!(rescale(&[5.0], &p, &[s(5.0, 0.0)]).unwrap(), vec![5.0 / 3.0]);
    }

    #[test]
    fn sparse_bins_are_interpolated() {
        let mut data = Vec::new();
        let mut r = Vec::new();
        for _ in 0..4 {
            data.push(s(5.0, 0.0));
            r.push(2.0);
            data.push(s(5.4, 0.0));
            r.push(6.0);
        }
        data.push(s(5.1, 0.0));
        r.push(100.0);
        let p = sigma_profile(&r, &data, 4).unwrap();
        let b = p.get(WindBin(51)).unwrap();
        assert!(b.interpolated);
        assert!((b.sigma - 3.0).abs() < 1e-12);
        assert!((p.sigma_at(5.3) - 5.0).abs() < 1e-12);
        assert_eq!(p.sigma_at(9.0), 6.0);
        assert_eq!(p.sigma_at(4.0), 2.0);
    }

    #[test]
    fn zero_sigma_names_bin() {
        let data = [s(5.0, 0.0), s(5.0, 0.0)];
        let p = sigma_profile(&[0.0, 0.0], &data, 1).unwrap();
        assert_eq!(rescale(&[1.0], &p, &[s(5.0, 0.0)]), Err(Error::ZeroSigma(WindBin(50))));
    }

    #[test]
    fn rescale_round_trip() {
        let data: Vec<Sample> = (0..50).map(|i| s(5.0 + (i % 5) as f64 * 0.1, 0.0)).collect();
        let r: Vec<f64> = (0..50).map(|i| (i as f64 * 0.7).sin() * 13.0).collect();
        let p = sigma_profile(&r, &data, 1).unwrap();
        let rs = rescale(&r, &p, &data).unwrap();
        for ((a, b), d) in rs.iter().zip(&r).zip(&data) {
            let back = a * p.sigma_at(d.wind);
            assert!((back - b).abs() <= 2.0 * f64::EPSILON * b.abs());
        }
    }

    fn normal_grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| normal_quantile((i as f64 + 0.5) / n as f64)).collect()
    }

    #[test]
    fn full_grid_band() {
        let mut r = Vec::new();
        let mut w = Vec::new();
        for k in BAND_GRID.0..=BAND_GRID.1 {
            for x in normal_grid(40) {
                r.push(x);
                w.push(k as f64 / 10.0);
            }
        }
        let band = gaussian_band(&r, &w, 0.05).unwrap();
        assert_eq!((band.g_lo, band.g_hi), (3.5, 15.0));
    }

    #[test]
    fn longest_run_wins() {
        let mut r = Vec::new();
        let mut w = Vec::new();
        for k in BAND_GRID.0..=BAND_GRID.1 {
            let gaussian = (50..=90).contains(&k) || (100..=110).contains(&k);
            let xs = if gaussian { normal_grid(40) } else { vec![3.0; 40] };
            for x in xs {
                r.push(x);
                w.push(k as f64 / 10.0);
            }
        }
        let band = gaussian_band(&r, &w, 0.05).unwrap();
        assert_eq!((band.g_lo, band.g_hi), (5.0, 9.0));
        assert!(band.contains(7.0) && !band.contains(9.1));
    }

    #[test]
    fn no_band_errors() {
        let r = vec![4.0; 200];
        let w: Vec<f64> = (0..200).map(|i| 5.0 + (i % 10) as f64 * 0.1).collect();
        assert_eq!(gaussian_band(&r, &w, 0.05), Err(Error::NoGaussianBand(0.05)));
        assert!(gaussian_band(&r, &w, 1.5).is_err());
    }
}
