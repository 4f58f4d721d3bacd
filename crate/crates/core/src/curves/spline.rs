//! Cubic B-splines: Cox-de Boor basis, least-squares fits and knot reallocation.

use alloc::vec;
use alloc::vec::Vec;

use super::{Auxiliary, FittedModel, ModelClass, ModelSpec, Support};
use crate::linalg::{least_squares, Matrix};
use crate::{Error, Result};

/// Grid resolution used to integrate `|S''|^{1/2}` during reallocation.
const REALLOCATION_GRID: usize = 4096;

pub(crate) fn validate_knots(knots: &[f64]) -> Result<()> {
    if knots.iter().any(|k| !k.is_finite()) {
        return Err(Error::NonFinite);
    }
    match knots.windows(2).position(|w| w[1] < w[0]) {
        Some(i) => Err(Error::DecreasingKnots(i + 1)),
        None => Ok(()),
    }
}

fn cox_de_boor(i: usize, knots: &[f64], degree: usize, x: f64) -> f64 {
    if degree == 0 {
        let end = knots[knots.len() - 1];
        let closing = x == end && knots[i + 1] == end && knots[i] < end;
        return if (knots[i] <= x && x < knots[i + 1]) || closing { 1.0 } else { 0.0 };
    }
    let mut acc = 0.0;
    let left = knots[i + degree] - knots[i];
    if left > 0.0 {
        acc += (x - knots[i]) / left * cox_de_boor(i, knots, degree - 1, x);
    }
    let right = knots[i + degree + 1] - knots[i + 1];
    if right > 0.0 {
        acc += (knots[i + degree + 1] - x) / right * cox_de_boor(i + 1, knots, degree - 1, x);
    }
    acc
}

/// `B_{i,k,d}(x)` by the Cox-de Boor recursion, with 1-based `i`.
///
/// Zero-width intervals contribute zero. The degree-0 functions are
/// indicators of half-open intervals `[k_i, k_{i+1})`, except that the last
/// non-empty interval also contains the final knot.
pub fn bspline_basis(i: usize, knots: &[f64], degree: usize, x: f64) -> Result<f64> {
    validate_knots(knots)?;
    let max = knots.len().saturating_sub(degree + 1);
    if i < 1 || i > max {
        return Err(Error::BasisIndex { index: i, max });
    }
    Ok(cox_de_boor(i - 1, knots, degree, x))
}

/// Index `s` of the knot span containing `x`, clamped so the right end of a
/// clamped knot vector belongs to the last non-empty span.
fn find_span(knots: &[f64], degree: usize, x: f64) -> usize {
    let n = knots.len() - degree - 1;
    if x >= knots[n] {
        let mut s = n - 1;
        while s > degree && knots[s] >= knots[n] {
            s -= 1;
        }
        return s;
    }
    if x <= knots[degree] {
        return degree;
    }
    let (mut lo, mut hi) = (degree, n);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if x < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Values of every basis function at `x`; `out.len()` is the basis count.
///
/// On a clamped knot vector the right end point of the support is included
/// in the last interval, so the basis sums to one on the closed interval.
pub(crate) fn basis_row(knots: &[f64], degree: usize, x: f64, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let span = find_span(knots, degree, x);
    let mut n = [0.0f64; 8];
    let mut left = [0.0f64; 8];
    let mut right = [0.0f64; 8];
    n[0] = 1.0;
    for j in 1..=degree {
        left[j] = x - knots[span + 1 - j];
        right[j] = knots[span + j] - x;
        let mut saved = 0.0;
        for r in 0..j {
            let denom = right[r + 1] + left[j - r];
            let temp = if denom != 0.0 { n[r] / denom } else { 0.0 };
            n[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        n[j] = saved;
    }
    for (r, v) in n.iter().take(degree + 1).enumerate() {
        out[span - degree + r] = *v;
    }
}

pub(crate) fn eval(knots: &[f64], coefficients: &[f64], degree: usize, x: f64) -> f64 {
    let span = find_span(knots, degree, x);
    let mut row = [0.0f64; 64];
    let width = coefficients.len();
    if width <= row.len() {
        basis_row(knots, degree, x, &mut row[..width]);
        (span - degree..=span).map(|i| row[i] * coefficients[i]).sum()
    } else {
        let mut row = vec![0.0; width];
        basis_row(knots, degree, x, &mut row);
        (span - degree..=span).map(|i| row[i] * coefficients[i]).sum()
    }
}

/// A spline curve `sum_i alpha_i B_{i,k,d}` on a clamped knot vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BSplineCurve {
    pub knots: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub degree: usize,
}

impl BSplineCurve {
    pub fn new(knots: Vec<f64>, coefficients: Vec<f64>, degree: usize) -> Result<Self> {
        validate_knots(&knots)?;
        if knots.len() != coefficients.len() + degree + 1 {
            return Err(Error::InvalidArgument("knot count must equal coefficients + degree + 1".into()));
        }
        Ok(BSplineCurve { knots, coefficients, degree })
    }

    pub fn eval(&self, x: f64) -> f64 {
        eval(&self.knots, &self.coefficients, self.degree, x)
    }

    /// The derivative as a spline of one lower degree.
    pub fn derivative(&self) -> BSplineCurve {
        let p = self.degree;
        assert!(p >= 1, "derivative of a piecewise-constant spline");
        let t = &self.knots;
        let c = &self.coefficients;
        let coefficients = (0..c.len() - 1)
            .map(|i| {
                let h = t[i + p + 1] - t[i + 1];
                if h > 0.0 {
                    p as f64 * (c[i + 1] - c[i]) / h
                } else {
                    0.0
                }
            })
            .collect();
        BSplineCurve { knots: t[1..t.len() - 1].to_vec(), coefficients, degree: p - 1 }
    }
}

/// Clamped cubic knot vector on `[lo, hi]` with `m - 4` equidistant interior knots.
pub fn equidistant_knots(m: usize, support: &Support) -> Vec<f64> {
    let interior = m - 4;
    let mut k = vec![support.lo; 4];
    for j in 1..=interior {
        k.push(support.lo + j as f64 * (support.hi - support.lo) / (interior + 1) as f64);
    }
    k.extend([support.hi; 4]);
    k
}

fn fit_coefficients(spec: &ModelSpec, knots: &[f64], xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    let m = spec.order;
    let design = Matrix::from_row_fn(xs.len(), m, |i, row| basis_row(knots, 3, xs[i], row));
    let ls = least_squares(&design, ys);
    if !ls.full_rank() {
        return Err(Error::RankDeficient { class: ModelClass::BSpline, order: m });
    }
    Ok(ls.coefficients)
}

/// Cubic spline least squares for a fixed knot vector.
pub(crate) fn fit_with_knots(spec: &ModelSpec, knots: Vec<f64>, xs: &[f64], ys: &[f64]) -> Result<FittedModel> {
    let alpha = fit_coefficients(spec, &knots, xs, ys)?;
    FittedModel::from_parts(*spec, alpha, Auxiliary::Knots(knots), f64::NAN)
}

/// Two rounds: equidistant knots, then knots reallocated from the first fit.
pub(crate) fn fit(spec: &ModelSpec, xs: &[f64], ys: &[f64]) -> Result<FittedModel> {
    let round1 = fit_with_knots(spec, equidistant_knots(spec.order, &spec.support), xs, ys)?;
    let knots = reallocate_knots(&round1)?;
    match fit_with_knots(spec, knots, xs, ys) {
        Ok(m) => Ok(m),
        Err(Error::RankDeficient { .. }) => Ok(round1),
        Err(e) => Err(e),
    }
}

/// Interior knots that equidistribute `integral |S''(x)|^{1/2} dx` of the
/// current spline; end knots are kept.
pub fn reallocate_knots(current: &FittedModel) -> Result<Vec<f64>> {
    let knots = match (current.class(), current.aux()) {
        (ModelClass::BSpline, Auxiliary::Knots(k)) => k.clone(),
        _ => return Err(Error::InvalidArgument("knot reallocation needs a spline model".into())),
    };
    let curve = BSplineCurve::new(knots.clone(), current.theta().to_vec(), 3)?;
    Ok(equidistribute(&curve))
}

fn equidistribute(curve: &BSplineCurve) -> Vec<f64> {
    let knots = &curve.knots;
    let m = curve.coefficients.len();
    let interior = m - 4;
    if interior == 0 {
        return knots.clone();
    }
    let (lo, hi) = (knots[3], knots[m]);
    let second = curve.derivative().derivative();
    let g = REALLOCATION_GRID;
    let step = (hi - lo) / g as f64;
    let values: Vec<f64> = (0..=g).map(|j| second.eval(lo + j as f64 * step).abs()).collect();
    let amplitude = curve.coefficients.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let peak = values.iter().fold(0.0f64, |a, v| a.max(*v));
    if peak <= 1e-9 * (amplitude + 1.0) / ((hi - lo) * (hi - lo)) {
        return knots.clone();
    }
    let mut cumulative = vec![0.0; g + 1];
    for j in 1..=g {
        cumulative[j] =
            cumulative[j - 1] + 0.5 * step * (libm::sqrt(values[j - 1]) + libm::sqrt(values[j]));
    }
    let total = cumulative[g];
    let mut out = knots[..4].to_vec();
    let mut j = 0;
    for q in 1..=interior {
        let target = total * q as f64 / (interior + 1) as f64;
        while j < g && cumulative[j + 1] < target {
            j += 1;
        }
        let seg = cumulative[j + 1] - cumulative[j];
        let frac = if seg > 0.0 { (target - cumulative[j]) / seg } else { 0.0 };
        let x = lo + (j as f64 + frac) * step;
        let prev = *out.last().unwrap();
        out.push(x.clamp(prev, hi));
    }
    out.extend_from_slice(&knots[m..]);
    out
}
