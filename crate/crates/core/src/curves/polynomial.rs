//! Polynomials in a standardized wind argument.

use alloc::vec::Vec;

use super::{Auxiliary, FittedModel, ModelSpec, PolyScaling};
use crate::linalg::{least_squares, Matrix};
use crate::{Error, Result};

/// `p_bar + d_p * sum_i theta_i ((w - w_bar) / d_w)^i`
pub fn eval(theta: &[f64], sc: &PolyScaling, w: f64) -> f64 {
    let z = (w - sc.wind_mean) / sc.wind_scale;
    let mut acc = 0.0;
    for c in theta.iter().rev() {
        acc = acc * z + c;
    }
    sc.power_mean + sc.power_scale * acc
}

fn mean_and_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let ss: f64 = v.iter().map(|x| (x - mean) * (x - mean)).sum();
    let sd = if v.len() > 1 { libm::sqrt(ss / (n - 1.0)) } else { 0.0 };
    (mean, sd)
}

/// Means and sample standard deviations of the transformed data.
pub fn scaling(xs: &[f64], ys: &[f64]) -> Result<PolyScaling> {
    let (wind_mean, wind_scale) = mean_and_sd(xs);
    let (power_mean, power_scale) = mean_and_sd(ys);
    if !(wind_scale > 0.0) {
        return Err(Error::InvalidArgument("wind has zero spread; polynomial scaling undefined".into()));
    }
    let power_scale = if power_scale > 0.0 { power_scale } else { 1.0 };
    Ok(PolyScaling { power_mean, wind_mean, power_scale, wind_scale })
}

/// Monomials `z^0..z^m` of the standardized wind, one row per sample.
pub fn scaled_design(xs: &[f64], sc: &PolyScaling, degree: usize) -> Matrix {
    Matrix::from_row_fn(xs.len(), degree + 1, |i, row| {
        let z = (xs[i] - sc.wind_mean) / sc.wind_scale;
        let mut v = 1.0;
        for r in row.iter_mut() {
            *r = v;
            v *= z;
        }
    })
}

pub(crate) fn fit(spec: &ModelSpec, xs: &[f64], ys: &[f64]) -> Result<FittedModel> {
    let sc = scaling(xs, ys)?;
    let design = scaled_design(xs, &sc, spec.order);
    let target: Vec<f64> = ys.iter().map(|y| (y - sc.power_mean) / sc.power_scale).collect();
    let ls = least_squares(&design, &target);
    if !ls.full_rank() {
        return Err(Error::RankDeficient { class: spec.class, order: spec.order });
    }
    FittedModel::from_parts(*spec, ls.coefficients, Auxiliary::Scaling(sc), f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{self, ModelClass};
    use crate::scada::Sample;

    #[test]
    fn exact_cubic_recovery() {
        let truth = |w: f64| 2.0 - 3.0 * w + 0.5 * w * w + 0.25 * w * w * w;
        let data: Vec<Sample> = (35..=150)
            .map(|t| {
                let w = t as f64 / 10.0;
                Sample { timestamp: t, wind: w, angle: 0.0, temperature: 0.0, power: truth(w) }
            })
            .collect();
        let spec = ModelSpec::new(ModelClass::Polynomial, 3).unwrap();
        let m = curves::fit(&spec, &data).unwrap();
        assert!(m.train_mse() < 1e-18, "{}", m.train_mse());
        for w in [3.5, 7.25, 11.0, 15.0] {
            assert!((m.eval(w).unwrap() - truth(w)).abs() < 1e-9);
        }
    }

    #[test]
    fn scaling_uses_sample_sd() {
        let sc = scaling(&[1.0, 3.0], &[0.0, 4.0]).unwrap();
        assert_eq!(sc.wind_mean, 2.0);
        assert!((sc.wind_scale - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert!((sc.power_scale - 2.0 * core::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(scaling(&[5.0, 5.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn too_high_degree_is_rank_deficient() {
        let data: Vec<Sample> = [4.0, 5.0, 6.0]
            .iter()
            .map(|&w| Sample { timestamp: 0, wind: w, angle: 0.0, temperature: 0.0, power: w })
            .collect();
        let spec = ModelSpec::new(ModelClass::Polynomial, 3).unwrap();
        assert!(matches!(curves::fit(&spec, &data), Err(Error::RankDeficient { order: 3, .. })));
    }
}
