//! Continuous piecewise-linear curves with fixed split points.

use alloc::vec::Vec;

use super::{constrained_samples, training_mse, Auxiliary, FittedModel, ModelClass, ModelSpec, Support};
use crate::linalg::{least_squares, Matrix};
use crate::scada::Sample;
use crate::{Error, Result};

/// `theta[0] + sum_k 1{s_k <= w} (w - s_k) theta[k + 1]`
pub fn eval(theta: &[f64], splits: &[f64], w: f64) -> f64 {
    let mut acc = theta[0];
    for (s, slope) in splits.iter().zip(&theta[1..]) {
        if *s <= w {
            acc += (w - s) * slope;
        }
    }
    acc
}

/// `s_k = lo + k (hi - lo) / m` for `k = 0..m`.
pub fn equidistant_splits(spec: &ModelSpec) -> Vec<f64> {
    let m = spec.order;
    let Support { lo, hi, .. } = spec.support;
    (0..m).map(|k| lo + k as f64 * (hi - lo) / m as f64).collect()
}

/// Distinct constrained wind values of `samples`, excluding the largest.
///
/// Used as split points these give one free slope between each pair of
/// neighbouring wind values, so the fit interpolates every bin mean.
pub fn distinct_wind_splits(samples: &[Sample], support: &Support) -> Result<Vec<f64>> {
    let data = constrained_samples(samples, support)?;
    let mut keys: Vec<i32> = data.iter().map(|s| s.wind_bin().0).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.pop();
    Ok(keys.into_iter().map(|k| k as f64 / 10.0).collect())
}

/// Least-squares fit with caller-supplied split points on the default support.
pub fn fit_piecewise_with_splits(splits: Vec<f64>, samples: &[Sample]) -> Result<FittedModel> {
    if splits.is_empty() {
        return Err(Error::InvalidArgument("at least one split point required".into()));
    }
    if splits.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("split points must be strictly increasing".into()));
    }
    let spec = ModelSpec::new(ModelClass::PiecewiseLinear, splits.len())?;
    let data = constrained_samples(samples, &spec.support)?;
    if data.is_empty() {
        return Err(Error::EmptyInput("no samples below cut-out"));
    }
    let xs: Vec<f64> = data.iter().map(|s| s.wind).collect();
    let ys: Vec<f64> = data.iter().map(|s| s.power).collect();
    let model = fit_with_splits(&spec, splits, &xs, &ys)?;
    let mse = training_mse(&model, &xs, &ys);
    Ok(model.with_train_mse(mse))
}

pub(crate) fn fit_with_splits(spec: &ModelSpec, splits: Vec<f64>, xs: &[f64], ys: &[f64]) -> Result<FittedModel> {
    let cols = splits.len() + 1;
    let design = Matrix::from_row_fn(xs.len(), cols, |i, row| {
        row[0] = 1.0;
        for (k, s) in splits.iter().enumerate() {
            row[k + 1] = if *s <= xs[i] { xs[i] - s } else { 0.0 };
        }
    });
    let ls = least_squares(&design, ys);
    if !ls.full_rank() {
        return Err(Error::RankDeficient { class: spec.class, order: spec.order });
    }
    FittedModel::from_parts(*spec, ls.coefficients, Auxiliary::Splits(splits), f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves;
    use crate::estimation::mse_lower_bound;
    use alloc::vec;

    fn s(wind: f64, power: f64) -> Sample {
        Sample { timestamp: 0, wind, angle: 0.0, temperature: 0.0, power }
    }

    #[test]
    fn split_grid() {
        let spec = ModelSpec::new(ModelClass::PiecewiseLinear, 5).unwrap();
        let sp = equidistant_splits(&spec);
        assert_eq!(sp.len(), 5);
        assert_eq!(sp[0], 3.5);
        assert!((sp[4] - (3.5 + 4.0 * 2.3)).abs() < 1e-12);
    }

    #[test]
    fn left_closed_indicator() {
        let theta = [1.0, 2.0, 10.0];
        let splits = [3.5, 5.0];
        assert_eq!(eval(&theta, &splits, 5.0), 1.0 + 2.0 * 1.5);
        assert_eq!(eval(&theta, &splits, 6.0), 1.0 + 2.0 * 2.5 + 10.0);
    }

    #[test]
    fn recovers_exact_broken_line() {
        let spec = ModelSpec::new(ModelClass::PiecewiseLinear, 2).unwrap();
        let sp = equidistant_splits(&spec);
        let truth = [5.0, 10.0, -7.0];
        let data: Vec<Sample> =
            (35..=150).map(|t| t as f64 / 10.0).map(|w| s(w, eval(&truth, &sp, w))).collect();
        let m = curves::fit(&spec, &data).unwrap();
        for (a, b) in m.theta().iter().zip(truth) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(m.train_mse() < 1e-18);
    }

    #[test]
    fn distinct_splits_attain_bound() {
        let mut data = Vec::new();
        for t in 30..=160 {
            let w = t as f64 / 10.0;
            for k in 0..4 {
                data.push(s(w, (w * w) + (k as f64 - 1.5) * (t % 7) as f64));
            }
        }
        let splits = distinct_wind_splits(&data, &Support::default()).unwrap();
        assert_eq!(splits.len(), 115);
        let m = fit_piecewise_with_splits(splits, &data).unwrap();
        let constrained = constrained_samples(&data, &Support::default()).unwrap();
        let bound = mse_lower_bound(&constrained).unwrap();
        assert!((m.train_mse() - bound).abs() <= 1e-6 * bound, "{} vs {bound}", m.train_mse());
    }

    #[test]
    fn unidentifiable_order_is_rank_deficient() {
        let data: Vec<Sample> = (35..=150).map(|t| s(t as f64 / 10.0, 1.0)).collect();
        let spec = ModelSpec::new(ModelClass::PiecewiseLinear, 116).unwrap();
        assert_eq!(
            curves::fit(&spec, &data),
            Err(Error::RankDeficient { class: ModelClass::PiecewiseLinear, order: 116 })
        );
        assert!(fit_piecewise_with_splits(vec![5.0, 4.0], &data).is_err());
    }
}
