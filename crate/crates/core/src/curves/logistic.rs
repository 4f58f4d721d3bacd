//! Five-parameter logistic and modified Stukel curves, fitted by Levenberg-Marquardt.

use alloc::vec;
use alloc::vec::Vec;


use super::{Auxiliary, FittedModel, ModelClass, ModelSpec, Support};
use crate::linalg::Matrix;
use crate::optim::{levenberg_marquardt, LeastSquaresProblem, LmOptions};
use crate::{Error, Result};

/// `t5 + (t1 - t5) / (1 + (w / t2)^t3)^t4`
pub fn five_pl(t: &[f64], w: f64) -> f64 {
    let u = (w / t[1]).powf(t[2]);
    t[4] + (t[0] - t[4]) / (1.0 + u).powf(t[3])
}

fn stukel_eta(t: &[f64], w: f64, support: &Support) -> f64 {
    let d = w - t[2];
    let mut eta = t[1] * d;
    if w >= support.lo && w < t[2] {
        eta += t[4] * d * d * d * d;
    } else if w >= t[2] && w <= support.hi {
        eta += t[5] * d * d;
    }
    eta
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `t1 + (t4 - t1) / (1 + exp(-eta))` with a quartic left branch and quadratic right branch in `eta`.
pub fn mstukel(t: &[f64], w: f64, support: &Support) -> f64 {
    t[0] + (t[3] - t[0]) * sigmoid(stukel_eta(t, w, support))
}

struct Problem<'a> {
    class: ModelClass,
    support: Support,
    xs: &'a [f64],
    ys: &'a [f64],
}

impl LeastSquaresProblem for Problem<'_> {
    fn n_residuals(&self) -> usize {
        self.xs.len()
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) -> bool {
        if self.class == ModelClass::Logistic5PL && !(p[1] > 0.0) {
            return false;
        }
        for ((o, &x), &y) in out.iter_mut().zip(self.xs).zip(self.ys) {
            let f = match self.class {
                ModelClass::Logistic5PL => five_pl(p, x),
                _ => mstukel(p, x, &self.support),
            };
            *o = y - f;
        }
        out.iter().all(|v| v.is_finite())
    }

    fn jacobian(&self, p: &[f64], out: &mut Matrix) {
        for (i, &w) in self.xs.iter().enumerate() {
            match self.class {
                ModelClass::Logistic5PL => {
                    let ratio = w / p[1];
                    let u = ratio.powf(p[2]);
                    let b = 1.0 + u;
                    let d = b.powf(p[3]);
                    let amp = p[0] - p[4];
                    let df_du = -amp * p[3] * b.powf(-p[3] - 1.0);
                    out.set(i, 0, -1.0 / d);
                    out.set(i, 1, -df_du * (-p[2] * u / p[1]));
                    out.set(i, 2, -df_du * u * ratio.ln());
                    out.set(i, 3, amp * b.ln() / d);
                    out.set(i, 4, -(1.0 - 1.0 / d));
                }
                _ => {
                    let s = sigmoid(stukel_eta(p, w, &self.support));
                    let df_deta = (p[3] - p[0]) * s * (1.0 - s);
                    let d = w - p[2];
                    let left = w >= self.support.lo && w < p[2];
                    let right = w >= p[2] && w <= self.support.hi;
                    let mut deta_d3 = -p[1];
                    if left {
                        deta_d3 -= 4.0 * p[4] * d * d * d;
                    } else if right {
                        deta_d3 -= 2.0 * p[5] * d;
                    }
                    out.set(i, 0, -(1.0 - s));
                    out.set(i, 1, -df_deta * d);
                    out.set(i, 2, -df_deta * deta_d3);
                    out.set(i, 3, -s);
                    out.set(i, 4, if left { -df_deta * d * d * d * d } else { 0.0 });
                    out.set(i, 5, if right { -df_deta * d * d } else { 0.0 });
                }
            }
        }
    }
}

/// Binned-mean extremes and the first wind whose binned mean reaches half range.
fn geometry(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let mut pairs: Vec<(i64, f64, usize)> = Vec::new();
    let mut keyed: Vec<(i64, f64)> = xs.iter().zip(ys).map(|(&x, &y)| ((x * 10.0).round() as i64, y)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    for (k, y) in keyed {
        match pairs.last_mut() {
            Some(last) if last.0 == k => {
                last.1 += y;
                last.2 += 1;
            }
            _ => pairs.push((k, y, 1)),
        }
    }
    let means: Vec<(f64, f64)> = pairs.iter().map(|&(k, s, n)| (k as f64 / 10.0, s / n as f64)).collect();
    let lo = means.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    let hi = means.iter().map(|m| m.1).fold(f64::NEG_INFINITY, f64::max);
    let half = 0.5 * (lo + hi);
    let w_half = means.iter().find(|m| m.1 >= half).map(|m| m.0).unwrap_or(means[0].0);
    (lo, hi, w_half)
}

pub(crate) fn initial_parameters(class: ModelClass, xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let (lo, hi, w_half) = geometry(xs, ys);
    match class {
        ModelClass::Logistic5PL => vec![lo, w_half, 5.0, 1.0, hi],
        _ => vec![lo, 0.6, w_half, hi, 0.0, 0.0],
    }
}

pub(crate) fn fit(spec: &ModelSpec, xs: &[f64], ys: &[f64]) -> Result<FittedModel> {
    let problem = Problem { class: spec.class, support: spec.support, xs, ys };
    let start = initial_parameters(spec.class, xs, ys);
    let report = levenberg_marquardt(&problem, &start, LmOptions::default())?;
    if report.params.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotConverged { objective: report.objective });
    }
    FittedModel::from_parts(*spec, report.params, Auxiliary::None, report.objective / xs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves;
    use crate::scada::Sample;

    const STUKEL_TABLE: [f64; 6] = [-30.8580, 0.5845, 9.6481, 2010.46, -0.0010, 0.1602];

    fn samples(f: impl Fn(f64) -> f64) -> Vec<Sample> {
        (35..=150)
            .flat_map(|t| {
                let w = t as f64 / 10.0;
                let y = f(w);
                (0..3).map(move |k| Sample { timestamp: k, wind: w, angle: 0.0, temperature: 0.0, power: y })
            })
            .collect()
    }

    #[test]
    fn five_pl_asymptotes_follow_formula() {
        let t = [0.0, 9.0, 6.0, 1.0, 2000.0];
        assert!(five_pl(&t, 1e-6) < 1e-3);
        assert!((five_pl(&t, 1e6) - 2000.0).abs() < 1e-3);
        assert!((five_pl(&t, 9.0) - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn mstukel_center_is_midpoint() {
        let sup = Support::default();
        let t = STUKEL_TABLE;
        let mid = mstukel(&t, t[2], &sup);
        assert!((mid - 0.5 * (t[0] + t[3])).abs() < 1e-9);
        assert!(mstukel(&t, 3.5, &sup) < 100.0);
        assert!(mstukel(&t, 15.0, &sup) > 1990.0);
    }

    #[test]
    fn recovers_mstukel_from_noiseless_curve() {
        let sup = Support::default();
        let data = samples(|w| mstukel(&STUKEL_TABLE, w, &sup));
        let spec = ModelSpec::new(ModelClass::MStukel, 6).unwrap();
        let m = curves::fit(&spec, &data).unwrap();
        assert!(m.train_mse() < 1e-6, "mse {}", m.train_mse());
        assert!((m.theta()[2] - 9.6481).abs() < 1e-3, "{:?}", m.theta());
    }

    #[test]
    fn recovers_five_pl_from_noiseless_curve() {
        let t = [-20.0, 9.5, 6.0, 1.2, 2010.0];
        let data = samples(|w| five_pl(&t, w));
        let spec = ModelSpec::new(ModelClass::Logistic5PL, 5).unwrap();
        let m = curves::fit(&spec, &data).unwrap();
        assert!(m.train_mse() < 1e-4, "mse {} {:?}", m.train_mse(), m.theta());
    }

    #[test]
    fn analytic_jacobians_match_finite_differences() {
        let xs: Vec<f64> = (0..40).map(|i| 3.5 + 0.29 * i as f64).collect();
        let ys = vec![0.0; xs.len()];
        for (class, p) in [
            (ModelClass::Logistic5PL, vec![-20.0, 9.5, 6.0, 1.2, 2010.0]),
            (ModelClass::MStukel, STUKEL_TABLE.to_vec()),
        ] {
            let prob = Problem { class, support: Support::default(), xs: &xs, ys: &ys };
            let mut jac = Matrix::zeros(xs.len(), p.len());
            prob.jacobian(&p, &mut jac);
            let mut r0 = vec![0.0; xs.len()];
            let mut r1 = vec![0.0; xs.len()];
            for j in 0..p.len() {
                let h = 1e-6 * p[j].abs().max(1e-3);
                let mut pp = p.clone();
                pp[j] += h;
                let mut pm = p.clone();
                pm[j] -= h;
                prob.residuals(&pp, &mut r1);
                prob.residuals(&pm, &mut r0);
                for i in 0..xs.len() {
                    let fd = (r1[i] - r0[i]) / (2.0 * h);
                    let an = jac.get(i, j);
                    assert!((fd - an).abs() <= 1e-4 * (1.0 + an.abs()), "{class} j={j} i={i}: {fd} vs {an}");
                }
            }
        }
    }

    #[test]
    fn initialization_reads_curve_geometry() {
        let sup = Support::default();
        let data = samples(|w| mstukel(&STUKEL_TABLE, w, &sup));
        let xs: Vec<f64> = data.iter().map(|s| s.wind).collect();
        let ys: Vec<f64> = data.iter().map(|s| s.power).collect();
        let p = initial_parameters(ModelClass::MStukel, &xs, &ys);
        assert_eq!(p[1], 0.6);
        assert!((p[2] - 9.7).abs() <= 0.1 + 1e-9);
        assert_eq!((p[4], p[5]), (0.0, 0.0));
        assert!(p[0] < p[3]);
    }
}
