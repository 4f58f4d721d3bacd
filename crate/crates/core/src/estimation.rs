//! MSE, per-bin statistics and the quantization lower bound on training MSE.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::scada::Sample;
use crate::{Error, PowerCurve, Result, WindBin};

/// Summary of the power observations sharing one quantized wind value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinStat {
    pub count: usize,
    pub mean: f64,
    /// Sum of squared deviations from `mean`.
    pub sum_sq_dev: f64,
}

impl BinStat {
    /// Population standard deviation within the bin.
    pub fn std_dev(&self) -> f64 {
        libm::sqrt(self.sum_sq_dev / self.count as f64)
    }
}

/// Power statistics keyed by quantized wind.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BinnedStats {
    bins: BTreeMap<WindBin, BinStat>,
}

impl BinnedStats {
    pub fn get(&self, bin: WindBin) -> Option<&BinStat> {
        self.bins.get(&bin)
    }

    pub fn iter(&self) -> impl Iterator<Item = (WindBin, &BinStat)> {
        self.bins.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn total_count(&self) -> usize {
        self.bins.values().map(|b| b.count).sum()
    }
}

/// Groups samples by quantized wind; mean and sum of squared deviations per bin.
pub fn binned_means(samples: &[Sample]) -> Result<BinnedStats> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("no samples to bin"));
    }
    let mut groups: BTreeMap<WindBin, Vec<f64>> = BTreeMap::new();
    for s in samples {
        groups.entry(s.wind_bin()).or_default().push(s.power);
    }
    let bins = groups
        .into_iter()
        .map(|(bin, ys)| {
            let mean = ys.iter().sum::<f64>() / ys.len() as f64;
            let sum_sq_dev = ys.iter().map(|y| (y - mean) * (y - mean)).sum();
            (bin, BinStat { count: ys.len(), mean, sum_sq_dev })
        })
        .collect();
    Ok(BinnedStats { bins })
}

/// Smallest training MSE any function of the quantized wind can attain.
pub fn mse_lower_bound(samples: &[Sample]) -> Result<f64> {
    let stats = binned_means(samples)?;
    let ss: f64 = stats.bins.values().map(|b| b.sum_sq_dev).sum();
    Ok(ss / samples.len() as f64)
}

/// Mean squared error of `model` on `samples`.
pub fn mse<M: PowerCurve + ?Sized>(model: &M, samples: &[Sample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("no samples for MSE"));
    }
    let mut acc = 0.0;
    for s in samples {
        let e = s.power - model.predict(s.wind, s.angle, s.temperature)?;
        acc += e * e;
    }
    Ok(acc / samples.len() as f64)
}
