//! Normal distribution helpers, order statistics and the Anderson-Darling test.

use alloc::vec::Vec;


use crate::{Error, Result};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// `ln Phi(x)`, accurate in the lower tail.
fn ln_normal_cdf(x: f64) -> f64 {
    (0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)).ln()
}

/// Standard normal quantile (Acklam's rational approximation plus one Halley step).
pub fn normal_quantile(p: f64) -> f64 {
    if !(p > 0.0) {
        return f64::NEG_INFINITY;
    }
    if !(p < 1.0) {
        return f64::INFINITY;
    }
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383_577_518_672_69e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] =
        [7.784695709041462e-3, 3.224671290700398e-1, 2.445134137142996, 3.754408661907416];
    const LOW: f64 = 0.02425;
    let x = if p < LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let e = normal_cdf(x) - p;
    let u = e * (2.0 * core::f64::consts::PI).sqrt() * (x * x / 2.0).exp();
    x - u / (1.0 + x * u / 2.0)
}

/// Type-7 quantile (linear interpolation between order statistics) of sorted data.
pub fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Anderson-Darling statistic and p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AndersonDarling {
    pub statistic: f64,
    pub p_value: f64,
}

/// Minimum sample size accepted by [`anderson_darling`].
pub const AD_MIN_SAMPLES: usize = 8;

/// Anderson-Darling test against the fully specified N(0, 1) (case 0).
///
/// The p-value uses the Marsaglia & Marsaglia (2004) approximation of the
/// limiting distribution together with their finite-`n` correction.
pub fn anderson_darling(samples: &[f64]) -> Result<AndersonDarling> {
    let n = samples.len();
    if n < AD_MIN_SAMPLES {
        return Err(Error::InsufficientSamples { given: n, needed: AD_MIN_SAMPLES });
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut x: Vec<f64> = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let weight = (2 * i + 1) as f64;
        // ln(1 - Phi(x)) = ln Phi(-x)
        acc += weight * (ln_normal_cdf(x[i]) + ln_normal_cdf(-x[n - 1 - i]));
    }
    let statistic = -nf - acc / nf;
    Ok(AndersonDarling { statistic, p_value: ad_p_value(n, statistic) })
}

/// Upper-tail probability `P(A^2 > z)` for sample size `n`.
pub fn ad_p_value(n: usize, z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z <= 0.0 {
        return 1.0;
    }
    if z.is_infinite() {
        return 0.0;
    }
    let cdf = ad_limit_cdf(z);
    let cdf = cdf + ad_error_fix(n as f64, cdf);
    (1.0 - cdf).clamp(0.0, 1.0)
}

fn ad_limit_cdf(z: f64) -> f64 {
    if z < 2.0 {
        (-1.2337141 / z).exp() / z.sqrt()
            * (2.00012
                + (0.247105 - (0.0649821 - (0.0347962 - (0.011672 - 0.00168691 * z) * z) * z) * z)
                    * z)
    } else {
        (-(1.0776 - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) * z)
            .exp())
        .exp()
    }
}

fn ad_error_fix(n: f64, x: f64) -> f64 {
    if x > 0.8 {
        let g3 = |x: f64| {
            -130.2137 + (745.2337 - (1705.091 - (1950.646 - (1116.360 - 255.7844 * x) * x) * x) * x) * x
        };
        // This polynomial has g3(1) = -6e-4; the linear term pins the
        // correction to zero at x = 1.
        return (g3(x) - g3(1.0) * (x - 0.8) / 0.2) / n;
    }
    let c = 0.01265 + 0.1757 / n;
    if x < c {
        let t = x / c;
        let t = t.sqrt() * (1.0 - t) * (49.0 * t - 102.0);
        return t * (0.0037 / (n * n) + 0.00078 / n + 0.00006) / n;
    }
    let t = (x - c) / (0.8 - c);
    let t = -0.00022633
        + (1.5 - (17.801 - (64.435 - (88.185 - (37.168 - 4.9314 * t) * t) * t) * t) * t) * t;
    t * (0.04213 + 0.01365 / n) / n
}
