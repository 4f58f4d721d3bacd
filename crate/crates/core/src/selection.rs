//! BIC order selection within a class and the Δ comparison across classes.

use alloc::vec::Vec;

use crate::curves::{self, constrained_samples, FittedModel, ModelClass, ModelSpec, Support};
use crate::estimation::mse;
use crate::scada::Sample;
use crate::{Error, PowerCurve, Result};

/// `ln(N) k + N ln(MSE) + N ln(2 pi) + 1`
pub fn bic(n_params: usize, n_samples: usize, train_mse: f64) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::EmptyInput("BIC needs at least one sample"));
    }
    if !(train_mse > 0.0) {
        return Err(Error::NonPositiveMse(train_mse));
    }
    let n = n_samples as f64;
    Ok(libm::log(n) * n_params as f64 + n * libm::log(train_mse) + n * libm::log(2.0 * core::f64::consts::PI) + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepEntry {
    pub order: usize,
    pub n_params: usize,
    pub train_mse: f64,
    pub bic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub class: ModelClass,
    pub sweep: Vec<SweepEntry>,
    /// Orders whose fit or BIC failed, with the reason.
    pub failures: Vec<(usize, Error)>,
    pub chosen_order: usize,
    pub chosen_model: FittedModel,
}

/// Fits every order in `grid` and keeps the BIC minimizer; ties go to the smaller order.
pub fn select_order(class: ModelClass, grid: &[usize], samples: &[Sample]) -> Result<SelectionResult> {
    select_order_with(class, grid, samples, Support::default())
}

pub fn select_order_with(
    class: ModelClass,
    grid: &[usize],
    samples: &[Sample],
    support: Support,
) -> Result<SelectionResult> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("order grid is empty".into()));
    }
    let mut grid = grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let n = constrained_samples(samples, &support)?.len();
    let mut sweep = Vec::new();
    let mut failures = Vec::new();
    let mut best: Option<(f64, FittedModel)> = None;
    for &order in &grid {
        let outcome = ModelSpec::new(class, order)
            .and_then(|s| s.with_support(support))
            .and_then(|spec| curves::fit(&spec, samples))
            .and_then(|m| bic(m.n_params(), n, m.train_mse()).map(|b| (b, m)));
        match outcome {
            Ok((b, model)) => {
                sweep.push(SweepEntry { order, n_params: model.n_params(), train_mse: model.train_mse(), bic: b });
                if best.as_ref().is_none_or(|(bb, _)| b < *bb) {
                    best = Some((b, model));
                }
            }
            Err(e) => failures.push((order, e)),
        }
    }
    match best {
        Some((_, model)) => {
            Ok(SelectionResult { class, sweep, failures, chosen_order: model.order(), chosen_model: model })
        }
        None => Err(Error::AllOrdersFailed),
    }
}

/// Mean squared difference of two models' predictions over `samples`,
/// relative to the smaller of their MSEs.
pub fn delta<A, B>(model_a: &A, model_b: &B, samples: &[Sample]) -> Result<f64>
where
    A: PowerCurve + ?Sized,
    B: PowerCurve + ?Sized,
{
    let mse_a = mse(model_a, samples)?;
    let mse_b = mse(model_b, samples)?;
    let denom = mse_a.min(mse_b);
    if !(denom > 0.0) {
        return Err(Error::NonPositiveMse(denom));
    }
    let mut acc = 0.0;
    for s in samples {
        let d = model_a.predict(s.wind, s.angle, s.temperature)? - model_b.predict(s.wind, s.angle, s.temperature)?;
        acc += d * d;
    }
    Ok(acc / samples.len() as f64 / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    struct Constant(f64);
    impl PowerCurve for Constant {
        fn predict(&self, _: f64, _: f64, _: f64) -> Result<f64> {
            Ok(self.0)
        }
    }

    fn s(wind: f64, power: f64) -> Sample {
        Sample { timestamp: 0, wind, angle: 0.0, temperature: 0.0, power }
    }

    #[test]
    fn bic_single_sample() {
        let b = bic(1, 1, 1.0).unwrap();
        assert!((b - ((2.0 * core::f64::consts::PI).ln() + 1.0)).abs() < 1e-12);
        assert!((b - 2.837877066409345).abs() < 1e-12);
    }

    #[test]
    fn bic_log_identity() {
        let a = bic(5, 1000, 3.0).unwrap();
        let b = bic(5, 1000, 6.0).unwrap();
        assert!((b - a - 1000.0 * core::f64::consts::LN_2).abs() < 1e-8);
        let c = bic(8, 1000, 2.0).unwrap();
        let expect = (1000f64).ln() * (8.0 - 5.0) + 1000.0 * (2.0f64 / 3.0).ln();
        assert!((c - a - expect).abs() < 1e-8);
    }

    #[test]
    fn bic_rejects_zero_mse() {
        assert_eq!(bic(3, 10, 0.0), Err(Error::NonPositiveMse(0.0)));
    }

    #[test]
    fn delta_constant_models() {
        let data = [s(5.0, 0.0), s(6.0, 0.0)];
        assert_eq!(delta(&Constant(1.0), &Constant(2.0), &data).unwrap(), 1.0);
        assert_eq!(delta(&Constant(2.0), &Constant(1.0), &data).unwrap(), 1.0);
        assert_eq!(delta(&Constant(1.0), &Constant(1.0), &data).unwrap(), 0.0);
        assert!(delta(&Constant(0.0), &Constant(1.0), &data).is_err());
    }

    #[test]
    fn single_order_grid() {
        let data: Vec<Sample> = (35..=150).map(|t| s(t as f64 / 10.0, (t % 5) as f64 + t as f64)).collect();
        let r = select_order(ModelClass::Polynomial, &[3], &data).unwrap();
        assert_eq!(r.chosen_order, 3);
        assert_eq!(r.sweep.len(), 1);
    }

    #[test]
    fn failed_orders_are_recorded() {
        let data: Vec<Sample> = [4.0, 5.0, 6.0, 7.0].iter().map(|&w| s(w, w * w + libm::sin(w))).collect();
        let r = select_order(ModelClass::Polynomial, &[1, 2, 5], &data).unwrap();
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].0, 5);
        assert!(select_order(ModelClass::Polynomial, &[6, 7], &data).is_err());
        assert!(select_order(ModelClass::Polynomial, &[], &data).is_err());
    }
}
