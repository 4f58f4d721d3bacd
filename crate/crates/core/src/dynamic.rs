//! ARMA layer on glued rescaled residuals and the dynamic power model.
//!
//! The ARMA recursion is
//! `r_t = mu + e_t + sum_i a_i r_{t-i} + sum_j c_j e_{t-j}`
//! with values and innovations before the first observation taken as zero.
//! Only samples whose wind lies in the Gaussian band enter the series; the
//! state stays frozen while the wind is outside.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::environmental::EnhancedModel;
use crate::linalg::{least_squares, Matrix};
use crate::optim::{levenberg_marquardt, LeastSquaresProblem, LmOptions};
use crate::residuals::{residuals, ResidualProfile};
use crate::scada::Sample;
use crate::{Error, Result, WindBin};

/// Roots are kept at most this far from the origin after projection.
pub const MAX_ROOT_RADIUS: f64 = 0.999;

/// In-band rescaled residuals in time order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GluedSeries {
    pub values: Vec<f64>,
    /// Output indices where excluded records were skipped over.
    pub segment_starts: Vec<usize>,
}

impl GluedSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Whether `wind` falls in the closed band on the 0.1 m/s grid.
pub fn band_contains(band: (f64, f64), wind: f64) -> bool {
    let b = WindBin::from_speed(wind);
    b >= WindBin::from_speed(band.0) && b <= WindBin::from_speed(band.1)
}

/// Keeps the in-band samples, recording each splice point.
pub fn glue(r_scaled: &[f64], winds: &[f64], band: (f64, f64)) -> Result<GluedSeries> {
    if r_scaled.len() != winds.len() {
        return Err(Error::InvalidArgument("residuals and winds differ in length".into()));
    }
    let mut out = GluedSeries::default();
    let mut last: Option<usize> = None;
    for (i, (r, w)) in r_scaled.iter().zip(winds).enumerate() {
        if !band_contains(band, *w) {
            continue;
        }
        if !r.is_finite() {
            return Err(Error::NonFinite);
        }
        if let Some(prev) = last {
            if i != prev + 1 {
                out.segment_starts.push(out.values.len());
            }
        }
        out.values.push(*r);
        last = Some(i);
    }
    if out.values.is_empty() {
        return Err(Error::InsufficientDynamicData { given: 0, needed: 1 });
    }
    Ok(out)
}

/// ARMA(q1, q2) coefficients with intercept and innovation variance.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmaModel {
    pub a: Vec<f64>,
    pub c: Vec<f64>,
    pub mu: f64,
    pub sigma2: f64,
}

impl ArmaModel {
    pub fn new(a: Vec<f64>, c: Vec<f64>, mu: f64, sigma2: f64) -> Result<Self> {
        if a.iter().chain(&c).chain([&mu, &sigma2]).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArma("non-finite coefficient".into()));
        }
        if !(sigma2 > 0.0) {
            return Err(Error::InvalidArma(alloc::format!("innovation variance {sigma2} must be positive")));
        }
        Ok(ArmaModel { a, c, mu, sigma2 })
    }

    pub fn q1(&self) -> usize {
        self.a.len()
    }

    pub fn q2(&self) -> usize {
        self.c.len()
    }

    /// Roots of `z^q1 - a_1 z^(q1-1) - ... - a_q1`.
    pub fn ar_roots(&self) -> Vec<Complex64> {
        let coeffs: Vec<f64> = self.a.iter().map(|v| -v).collect();
        polynomial_roots(&coeffs)
    }

    /// Roots of `z^q2 + c_1 z^(q2-1) + ... + c_q2`.
    pub fn ma_roots(&self) -> Vec<Complex64> {
        polynomial_roots(&self.c)
    }

    pub fn is_stable(&self) -> bool {
        self.ar_roots().iter().all(|z| z.norm() < 1.0)
    }

    pub fn is_invertible(&self) -> bool {
        self.ma_roots().iter().all(|z| z.norm() < 1.0)
    }

    /// First `n` weights of the moving-average expansion, `psi_0 = 1`.
    pub fn psi(&self, n: usize) -> Vec<f64> {
        let mut psi = vec![0.0; n];
        for j in 0..n {
            let mut v = if j == 0 { 1.0 } else { self.c.get(j - 1).copied().unwrap_or(0.0) };
            for (i, a) in self.a.iter().enumerate() {
                if j > i {
                    v += a * psi[j - i - 1];
                }
            }
            psi[j] = v;
        }
        psi
    }

    /// Variance of the `h`-step forecast error, `sigma2 * sum_{j<h} psi_j^2`.
    pub fn forecast_variance(&self, h: usize) -> Result<f64> {
        if h == 0 {
            return Err(Error::InvalidArgument("forecast horizon must be at least one step".into()));
        }
        Ok(self.sigma2 * self.psi(h).iter().map(|p| p * p).sum::<f64>())
    }

    /// Marginal variance of the stationary process.
    pub fn stationary_variance(&self) -> f64 {
        let mut n = 256;
        let total = loop {
            let psi = self.psi(n);
            let total = psi.iter().map(|p| p * p).sum::<f64>();
            let tail: f64 = psi[n / 2..].iter().map(|p| p * p).sum();
            if tail <= 1e-16 * total || n >= 1 << 20 {
                break total;
            }
            n *= 4;
        };
        self.sigma2 * total
    }

    /// Mean of the stationary process, `mu / (1 - sum a_i)`.
    pub fn stationary_mean(&self) -> f64 {
        self.mu / (1.0 - self.a.iter().sum::<f64>())
    }

    pub fn initial_state(&self) -> ArmaState {
        ArmaState { r: vec![0.0; self.q1()], e: vec![0.0; self.q2()] }
    }

    fn conditional_mean(&self, state: &ArmaState) -> f64 {
        let mut m = self.mu;
        for (a, r) in self.a.iter().zip(&state.r) {
            m += a * r;
        }
        for (c, e) in self.c.iter().zip(&state.e) {
            m += c * e;
        }
        m
    }
}

/// Recent values and innovations of the recursion, most recent first.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmaState {
    pub r: Vec<f64>,
    pub e: Vec<f64>,
}

fn push_front(buf: &mut [f64], v: f64) {
    if buf.is_empty() {
        return;
    }
    buf.copy_within(0..buf.len() - 1, 1);
    buf[0] = v;
}

impl ArmaState {
    /// Consumes one observation and returns its one-step innovation.
    pub fn update(&mut self, model: &ArmaModel, value: f64) -> f64 {
        let innovation = value - model.conditional_mean(self);
        push_front(&mut self.r, value);
        push_front(&mut self.e, innovation);
        innovation
    }

    /// Point forecasts for 1..=steps ahead with future innovations at zero.
    pub fn forecast_path(&self, model: &ArmaModel, steps: usize) -> Vec<f64> {
        let mut s = self.clone();
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            let m = model.conditional_mean(&s);
            push_front(&mut s.r, m);
            push_front(&mut s.e, 0.0);
            out.push(m);
        }
        out
    }
}

/// Runs the recursion over `history` and forecasts `h_steps` ahead.
pub fn forecast_residual(model: &ArmaModel, history: &GluedSeries, h_steps: usize) -> Result<(f64, f64)> {
    if h_steps == 0 {
        return Err(Error::InvalidArgument("forecast horizon must be at least one step".into()));
    }
    let mut state = model.initial_state();
    for v in &history.values {
        state.update(model, *v);
    }
    let mean = *state.forecast_path(model, h_steps).last().unwrap();
    Ok((mean, model.forecast_variance(h_steps)?))
}

/// Roots of the monic polynomial `z^n + coeffs[0] z^(n-1) + ... + coeffs[n-1]`
/// by the Durand-Kerner iteration.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![Complex64::new(-coeffs[0], 0.0)];
    }
    let eval = |z: Complex64| coeffs.iter().fold(Complex64::new(1.0, 0.0), |acc, c| acc * z + c);
    let bound = 1.0 + coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * (bound / 2.0).max(0.5)).collect();
    for _ in 0..2000 {
        let mut change: f64 = 0.0;
        for i in 0..n {
            let zi = roots[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, zj) in roots.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-12, 0.0);
            }
            let step = eval(zi) / denom;
            roots[i] = zi - step;
            change = change.max(step.norm() / (1.0 + zi.norm()));
        }
        if change < 1e-15 {
            break;
        }
    }
    roots
}

/// Coefficients `b` of `prod (z - root) = z^n + b_1 z^(n-1) + ... + b_n`.
fn monic_from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (k, p) in poly.iter().enumerate() {
            next[k] += p;
            next[k + 1] -= p * r;
        }
        poly = next;
    }
    poly[1..].iter().map(|c| c.re).collect()
}

/// Moves roots on or outside the unit circle to their reciprocal conjugate
/// and caps every modulus at [`MAX_ROOT_RADIUS`]. Returns `None` when no root
/// needed moving.
fn project_roots(coeffs: &[f64]) -> Option<Vec<f64>> {
    let roots = polynomial_roots(coeffs);
    if roots.iter().all(|z| z.norm() <= MAX_ROOT_RADIUS) {
        return None;
    }
    let moved: Vec<Complex64> = roots
        .into_iter()
        .map(|z| {
            let z = if z.norm() >= 1.0 { Complex64::new(1.0, 0.0) / z.conj() } else { z };
            if z.norm() > MAX_ROOT_RADIUS {
                z * (MAX_ROOT_RADIUS / z.norm())
            } else {
                z
            }
        })
        .collect();
    Some(monic_from_roots(&moved))
}

/// Projects `a` and `c` into the stable and invertible region.
pub fn project(a: &[f64], c: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let neg: Vec<f64> = a.iter().map(|v| -v).collect();
    let a = match project_roots(&neg) {
        Some(b) => b.iter().map(|v| -v).collect(),
        None => a.to_vec(),
    };
    let c = project_roots(c).unwrap_or_else(|| c.to_vec());
    (a, c)
}

/// Root modulus the conditional-sum-of-squares search may not leave; it sits
/// between [`MAX_ROOT_RADIUS`] and one so projected models stay admissible.
const SEARCH_ROOT_RADIUS: f64 = 0.5 * (1.0 + MAX_ROOT_RADIUS);

fn inside_root_bound(a: &[f64], c: &[f64]) -> bool {
    let neg: Vec<f64> = a.iter().map(|v| -v).collect();
    polynomial_roots(&neg).iter().chain(polynomial_roots(c).iter()).all(|z| z.norm() <= SEARCH_ROOT_RADIUS)
}

struct Css<'a> {
    y: &'a [f64],
    q1: usize,
}

impl Css<'_> {
    fn split<'p>(&self, p: &'p [f64]) -> (f64, &'p [f64], &'p [f64]) {
        (p[0], &p[1..1 + self.q1], &p[1 + self.q1..])
    }
}

impl LeastSquaresProblem for Css<'_> {
    fn n_residuals(&self) -> usize {
        self.y.len()
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) -> bool {
        let (mu, a, c) = self.split(p);
        if !inside_root_bound(a, c) {
            return false;
        }
        for t in 0..self.y.len() {
            let mut e = self.y[t] - mu;
            for (i, ai) in a.iter().enumerate() {
                if t > i {
                    e -= ai * self.y[t - i - 1];
                }
            }
            for (j, cj) in c.iter().enumerate() {
                if t > j {
                    e -= cj * out[t - j - 1];
                }
            }
            if !e.is_finite() || e.abs() > 1e150 {
                return false;
            }
            out[t] = e;
        }
        true
    }

    fn jacobian(&self, p: &[f64], jac: &mut Matrix) {
        let n = self.y.len();
        let (_, _, c) = self.split(p);
        let mut e = vec![0.0; n];
        self.residuals(p, &mut e);
        let k = p.len();
        for col in 0..k {
            for t in 0..n {
                let mut d = if col == 0 {
                    -1.0
                } else if col <= self.q1 {
                    let lag = col;
                    if t >= lag {
                        -self.y[t - lag]
                    } else {
                        0.0
                    }
                } else {
                    let lag = col - self.q1;
                    if t >= lag {
                        -e[t - lag]
                    } else {
                        0.0
                    }
                };
                for (j, cj) in c.iter().enumerate() {
                    if t > j {
                        d -= cj * jac.get(t - j - 1, col);
                    }
                }
                jac.set(t, col, d);
            }
        }
    }
}

fn css(y: &[f64], q1: usize, mu: f64, a: &[f64], c: &[f64]) -> Result<f64> {
    let mut p = vec![mu];
    p.extend_from_slice(a);
    p.extend_from_slice(c);
    let mut e = vec![0.0; y.len()];
    if !(Css { y, q1 }).residuals(&p, &mut e) {
        return Err(Error::NotConverged { objective: f64::INFINITY });
    }
    Ok(e.iter().map(|v| v * v).sum())
}

/// Long-autoregression order used to proxy innovations: `ceil(10 ln n)`.
pub fn long_ar_order(n: usize) -> usize {
    libm::ceil(10.0 * libm::log(n as f64)) as usize
}

/// Regression of `y_t` on an intercept and `y_{t-1..t-p}` for rows `t >= start`.
fn lagged_regression(y: &[f64], p: usize, start: usize) -> Option<Vec<f64>> {
    let rows = y.len() - start;
    let design = Matrix::from_row_fn(rows, p + 1, |i, row| {
        let t = start + i;
        row[0] = 1.0;
        for l in 1..=p {
            row[l] = if t >= l { y[t - l] } else { 0.0 };
        }
    });
    let ls = least_squares(&design, &y[start..]);
    ls.full_rank().then_some(ls.coefficients)
}

/// Conditional least squares ARMA(q1, q2) estimate with joint intercept.
///
/// Pure autoregressions are solved exactly. With moving-average terms the
/// start comes from the two-stage Hannan-Rissanen regression and is refined
/// by Levenberg-Marquardt on the conditional sum of squares. The result is
/// projected into the stable and invertible region and the innovation
/// variance is the conditional sum of squares over `n`.
pub fn fit_arma(series: &GluedSeries, q1: usize, q2: usize) -> Result<ArmaModel> {
    let y = &series.values;
    let n = y.len();
    let needed = 10 * (q1 + q2 + 1);
    if n < needed {
        return Err(Error::InsufficientDynamicData { given: n, needed });
    }
    let (mu, a, c) = if q2 == 0 {
        let coef = lagged_regression(y, q1, 0)
            .ok_or(Error::InvalidArma("degenerate autoregression design".into()))?;
        (coef[0], coef[1..].to_vec(), Vec::new())
    } else {
        let order = long_ar_order(n);
        if n <= 2 * order + q1 + q2 + 1 {
            return Err(Error::SeriesTooShort { len: n, order });
        }
        let long = lagged_regression(y, order, order)
            .ok_or(Error::InvalidArma("degenerate long autoregression".into()))?;
        let mut innov = vec![0.0; n];
        for t in order..n {
            let mut pred = long[0];
            for l in 1..=order {
                pred += long[l] * y[t - l];
            }
            innov[t] = y[t] - pred;
        }
        let start = order + q2.max(q1);
        let rows = n - start;
        let design = Matrix::from_row_fn(rows, 1 + q1 + q2, |i, row| {
            let t = start + i;
            row[0] = 1.0;
            for l in 1..=q1 {
                row[l] = y[t - l];
            }
            for l in 1..=q2 {
                row[q1 + l] = innov[t - l];
            }
        });
        let ls = least_squares(&design, &y[start..]);
        let init = if ls.full_rank() { ls.coefficients } else { vec![0.0; 1 + q1 + q2] };
        let (a0, c0) = project(&init[1..1 + q1], &init[1 + q1..]);
        let mut start_params = vec![init[0]];
        start_params.extend(a0);
        start_params.extend(c0);
        let report = levenberg_marquardt(&Css { y, q1 }, &start_params, LmOptions::default())?;
        let p = report.params;
        (p[0], p[1..1 + q1].to_vec(), p[1 + q1..].to_vec())
    };
    let (a, c) = project(&a, &c);
    let total = css(y, q1, mu, &a, &c)?;
    ArmaModel::new(a, c, mu, total / n as f64)
}

/// Wind, angle and temperature for one future step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exogenous {
    pub wind: f64,
    pub angle: f64,
    pub temperature: f64,
}

impl From<&Sample> for Exogenous {
    fn from(s: &Sample) -> Self {
        Exogenous { wind: s.wind, angle: s.angle, temperature: s.temperature }
    }
}

/// Point forecast and forecast-error variance, kW and kW².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Forecast {
    pub mean: f64,
    pub variance: f64,
}

impl Forecast {
    /// Symmetric Gaussian interval with two-sided coverage `level`.
    pub fn interval(&self, level: f64) -> (f64, f64) {
        let z = crate::stats::normal_quantile(0.5 + 0.5 * level);
        let half = z * libm::sqrt(self.variance);
        (self.mean - half, self.mean + half)
    }
}

/// Enhanced static curve plus an ARMA process on in-band rescaled residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicModel {
    pub enhanced: EnhancedModel,
    pub profile: ResidualProfile,
    pub arma: ArmaModel,
    /// Mean squared residual over out-of-band training records.
    pub sigma_e2: f64,
}

impl DynamicModel {
    pub fn fit(
        enhanced: EnhancedModel,
        profile: ResidualProfile,
        samples: &[Sample],
        q1: usize,
        q2: usize,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("no training samples for dynamic layer"));
        }
        let r = residuals(&enhanced, samples)?;
        let band = (profile.g_lo, profile.g_hi);
        let mut scaled = Vec::with_capacity(r.len());
        let mut winds = Vec::with_capacity(r.len());
        let (mut out_ss, mut out_n) = (0.0, 0usize);
        for (e, s) in r.iter().zip(samples) {
            if band_contains(band, s.wind) {
                let sd = profile.sigma_at(s.wind);
                if !(sd > 0.0) {
                    return Err(Error::ZeroSigma(s.wind_bin()));
                }
                scaled.push(e / sd);
            } else {
                out_ss += e * e;
                out_n += 1;
                scaled.push(0.0);
            }
            winds.push(s.wind);
        }
        let series = glue(&scaled, &winds, band)?;
        let arma = fit_arma(&series, q1, q2)?;
        let sigma_e2 = if out_n > 0 { out_ss / out_n as f64 } else { 0.0 };
        Ok(DynamicModel { enhanced, profile, arma, sigma_e2 })
    }

    pub fn in_band(&self, wind: f64) -> bool {
        band_contains((self.profile.g_lo, self.profile.g_hi), wind)
    }

    /// Rescaled residual of an observed sample, `None` when out of band.
    pub fn scaled_residual(&self, s: &Sample) -> Result<Option<f64>> {
        if !self.in_band(s.wind) {
            return Ok(None);
        }
        let sd = self.profile.sigma_at(s.wind);
        if !(sd > 0.0) {
            return Err(Error::ZeroSigma(s.wind_bin()));
        }
        Ok(Some((s.power - self.enhanced.eval(s.wind, s.angle, s.temperature)?) / sd))
    }

    /// ARMA state after the in-band part of `history`.
    pub fn filter(&self, history: &[Sample]) -> Result<ArmaState> {
        let mut state = self.arma.initial_state();
        for s in history {
            self.advance(&mut state, s)?;
        }
        Ok(state)
    }

    /// Feeds one observed sample into `state` (no-op out of band).
    pub fn advance(&self, state: &mut ArmaState, s: &Sample) -> Result<()> {
        if let Some(v) = self.scaled_residual(s)? {
            state.update(&self.arma, v);
        }
        Ok(())
    }

    /// Forecasts for the first `h` entries of `future`, from a filtered state.
    pub fn forecast_from(&self, state: &ArmaState, future: &[Exogenous], h: usize) -> Result<Vec<Forecast>> {
        if future.len() < h {
            return Err(Error::HorizonTooLong { steps: h, len: future.len() });
        }
        let future = &future[..h];
        let in_band: Vec<bool> = future.iter().map(|x| self.in_band(x.wind)).collect();
        let steps = in_band.iter().filter(|b| **b).count();
        let path = state.forecast_path(&self.arma, steps);
        let psi = self.arma.psi(steps);
        let mut out = Vec::with_capacity(h);
        let mut j = 0;
        let mut cum = 0.0;
        for (x, inside) in future.iter().zip(in_band) {
            let base = self.enhanced.eval(x.wind, x.angle, x.temperature)?;
            if inside {
                cum += psi[j] * psi[j];
                let sd = self.profile.sigma_at(x.wind);
                out.push(Forecast { mean: base + sd * path[j], variance: sd * sd * self.arma.sigma2 * cum });
                j += 1;
            } else {
                out.push(Forecast { mean: base, variance: self.sigma_e2 });
            }
        }
        Ok(out)
    }

    /// Forecasts `h` future steps given the observed `history` and known future inputs.
    pub fn predict_power(&self, history: &[Sample], future: &[Exogenous], h: usize) -> Result<Vec<Forecast>> {
        let state = self.filter(history)?;
        self.forecast_from(&state, future, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glue_contracts() {
        let r = [1.0, 2.0, 3.0, 4.0, 5.0];
        let all = glue(&r, &[6.0; 5], (5.0, 14.0)).unwrap();
        assert_eq!(all.values, r.to_vec());
        assert!(all.segment_starts.is_empty());
        let w = [6.0, 2.0, 6.0, 2.0, 6.0];
        let alt = glue(&r, &w, (5.0, 14.0)).unwrap();
        assert_eq!(alt.values, vec![1.0, 3.0, 5.0]);
        assert_eq!(alt.segment_starts, vec![1, 2]);
        assert!(glue(&r, &[1.0; 5], (5.0, 14.0)).is_err());
    }

    #[test]
    fn band_edges_are_inclusive() {
        assert!(band_contains((5.4, 13.6), 5.4));
        assert!(band_contains((5.4, 13.6), 13.6));
        assert!(!band_contains((5.4, 13.6), 13.7));
        assert!(!band_contains((5.4, 13.6), 5.3));
    }

    #[test]
    fn psi_weights_ar1() {
        let m = ArmaModel::new(vec![0.5], vec![], 0.0, 2.0).unwrap();
        let psi = m.psi(4);
        assert_eq!(psi, vec![1.0, 0.5, 0.25, 0.125]);
        assert!((m.forecast_variance(3).unwrap() - 2.0 * (1.0 + 0.25 + 0.0625)).abs() < 1e-15);
        assert!((m.stationary_variance() - 2.0 / 0.75).abs() < 1e-12);
    }

    #[test]
    fn ma1_one_step_variance() {
        let m = ArmaModel::new(vec![], vec![0.7], 0.0, 1.5).unwrap();
        assert_eq!(m.forecast_variance(1).unwrap(), 1.5);
        assert_eq!(m.psi(3), vec![1.0, 0.7, 0.0]);
        assert!(m.forecast_variance(0).is_err());
    }

    #[test]
    fn variance_grows_to_stationary_limit() {
        let m = ArmaModel::new(vec![1.2, -0.4], vec![0.3], 0.0, 1.0).unwrap();
        let lim = m.stationary_variance();
        let mut prev = 0.0;
        for h in 1..200 {
            let v = m.forecast_variance(h).unwrap();
            assert!(v >= prev && v <= lim + 1e-9);
            prev = v;
        }
        assert!((prev - lim).abs() < 1e-9);
    }

    #[test]
    fn roots_of_known_polynomials() {
        // (z - 0.5)(z + 0.25) = z^2 - 0.25 z - 0.125
        let mut roots: Vec<f64> = polynomial_roots(&[-0.25, -0.125]).iter().map(|z| z.re).collect();
        roots.sort_by(f64::total_cmp);
        assert!((roots[0] + 0.25).abs() < 1e-12 && (roots[1] - 0.5).abs() < 1e-12);
        let cplx = polynomial_roots(&[0.0, 0.81]);
        for z in cplx {
            assert!((z.norm() - 0.9).abs() < 1e-12);
        }
        let back = monic_from_roots(&polynomial_roots(&[0.3, -0.2, 0.1]));
        for (a, b) in back.iter().zip([0.3, -0.2, 0.1]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_reflects_explosive_roots() {
        let (a, c) = project(&[1.5], &[-2.0]);
        assert!((a[0] - 1.0 / 1.5).abs() < 1e-12);
        assert!((c[0] + 0.5).abs() < 1e-12);
        let (a, c) = project(&[1.0], &[1.0]);
        assert!((a[0] - MAX_ROOT_RADIUS).abs() < 1e-12);
        assert!((c[0] - MAX_ROOT_RADIUS).abs() < 1e-12);
        let (a, c) = project(&[0.5, 0.2], &[0.1]);
        assert_eq!((a, c), (vec![0.5, 0.2], vec![0.1]));
    }

    #[test]
    fn state_update_and_forecast() {
        let m = ArmaModel::new(vec![0.5], vec![0.2], 1.0, 1.0).unwrap();
        let mut s = m.initial_state();
        let e0 = s.update(&m, 3.0);
        assert_eq!(e0, 2.0);
        let e1 = s.update(&m, 2.0);
        assert!((e1 - (2.0 - (1.0 + 1.5 + 0.4))).abs() < 1e-15);
        let path = s.forecast_path(&m, 2);
        assert!((path[0] - (1.0 + 0.5 * 2.0 + 0.2 * e1)).abs() < 1e-15);
        assert!((path[1] - (1.0 + 0.5 * path[0])).abs() < 1e-15);
    }

    #[test]
    fn white_noise_order_zero() {
        let values: Vec<f64> = (0..200).map(|i| libm::sin(i as f64 * 1.7) * 2.0 + 0.3).collect();
        let m = fit_arma(&GluedSeries { values: values.clone(), segment_starts: vec![] }, 0, 0).unwrap();
        let mean = values.iter().sum::<f64>() / 200.0;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 200.0;
        assert!((m.mu - mean).abs() < 1e-12);
        assert!((m.sigma2 - var).abs() < 1e-12);
    }

    #[test]
    fn short_series_errors() {
        let s = GluedSeries { values: vec![0.1; 25], segment_starts: vec![] };
        assert_eq!(fit_arma(&s, 1, 1), Err(Error::InsufficientDynamicData { given: 25, needed: 30 }));
    }

    #[test]
    fn css_jacobian_matches_finite_difference() {
        let y: Vec<f64> = (0..60).map(|i| libm::sin(i as f64 * 0.9) + 0.3 * libm::cos(i as f64 * 2.3)).collect();
        let prob = Css { y: &y, q1: 2 };
        let p = [0.1, 0.4, -0.2, 0.3, 0.1];
        let mut jac = Matrix::zeros(y.len(), p.len());
        prob.jacobian(&p, &mut jac);
        let mut rp = vec![0.0; y.len()];
        let mut rm = vec![0.0; y.len()];
        for k in 0..p.len() {
            let h = 1e-6;
            let mut pp = p;
            pp[k] += h;
            let mut pm = p;
            pm[k] -= h;
            prob.residuals(&pp, &mut rp);
            prob.residuals(&pm, &mut rm);
            for t in 0..y.len() {
                let fd = (rp[t] - rm[t]) / (2.0 * h);
                assert!((fd - jac.get(t, k)).abs() < 1e-6, "k={k} t={t}");
            }
        }
    }
}
