//! Damped Gauss-Newton (Levenberg-Marquardt) for small nonlinear least squares.

use alloc::vec;
use alloc::vec::Vec;


use crate::linalg::{least_squares, Matrix};
use crate::{Error, Result};

/// A sum-of-squares objective `sum_i r_i(p)^2`.
pub trait LeastSquaresProblem {
    fn n_residuals(&self) -> usize;

    /// Writes residuals for `params` into `out`. Returns `false` when the
    /// parameters are outside the model's domain (the step is rejected).
    fn residuals(&self, params: &[f64], out: &mut [f64]) -> bool;

    /// Jacobian of the residuals, `n_residuals x params.len()`.
    fn jacobian(&self, params: &[f64], out: &mut Matrix);
}

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop when an accepted step lowers the objective by less than this fraction.
    pub rel_tolerance: f64,
    /// Stop when every Jacobian column is this close to orthogonal to the residuals.
    pub gradient_tolerance: f64,
    /// Stop when an accepted step is this small relative to the scaled parameters.
    pub step_tolerance: f64,
    pub initial_damping: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iterations: 500,
            rel_tolerance: 1e-10,
            gradient_tolerance: 1e-10,
            step_tolerance: 1e-10,
            initial_damping: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmReport {
    pub params: Vec<f64>,
    /// Final sum of squared residuals.
    pub objective: f64,
    pub iterations: usize,
    /// False when the iteration cap ended the search.
    pub converged: bool,
}

const MAX_DAMPING: f64 = 1e16;

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

pub fn levenberg_marquardt<P: LeastSquaresProblem>(
    problem: &P,
    start: &[f64],
    options: LmOptions,
) -> Result<LmReport> {
    let n = problem.n_residuals();
    let p = start.len();
    let mut params = start.to_vec();
    let mut resid = vec![0.0; n];
    if !problem.residuals(&params, &mut resid) {
        return Err(Error::InvalidArgument("starting point outside model domain".into()));
    }
    let mut objective = sum_sq(&resid);
    if !objective.is_finite() {
        return Err(Error::NotConverged { objective });
    }
    let mut lambda = options.initial_damping;
    let mut nu = 2.0;
    let mut jac = Matrix::zeros(n, p);
    let mut trial = vec![0.0; p];
    let mut trial_resid = vec![0.0; n];
    let mut need_jacobian = true;
    let mut scale = vec![0.0; p];

    for iteration in 1..=options.max_iterations {
        if objective == 0.0 {
            return Ok(LmReport { params, objective, iterations: iteration - 1, converged: true });
        }
        if need_jacobian {
            problem.jacobian(&params, &mut jac);
            for (j, s) in scale.iter_mut().enumerate() {
                let d: f64 = jac.column(j).iter().map(|v| v * v).sum();
                *s = d.sqrt().max(1e-12);
            }
            need_jacobian = false;
            let r_norm = objective.sqrt();
            let cosine = (0..p)
                .map(|j| {
                    let g: f64 = jac.column(j).iter().zip(&resid).map(|(a, b)| a * b).sum();
                    g.abs() / (scale[j] * r_norm)
                })
                .fold(0.0, f64::max);
            if cosine <= options.gradient_tolerance {
                return Ok(LmReport { params, objective, iterations: iteration - 1, converged: true });
            }
        }
        // Solve [J; sqrt(lambda) D] delta = [-r; 0] by QR.
        let damping = lambda.sqrt();
        let damp = Matrix::from_row_fn(p, p, |i, row| row[i] = damping * scale[i]);
        let aug = jac.stack(&damp);
        let mut rhs: Vec<f64> = resid.iter().map(|r| -r).collect();
        rhs.extend(core::iter::repeat_n(0.0, p));
        let step = least_squares(&aug, &rhs).coefficients;

        for ((t, &x), &d) in trial.iter_mut().zip(&params).zip(&step) {
            *t = x + d;
        }
        let valid = problem.residuals(&trial, &mut trial_resid);
        let new_obj = if valid { sum_sq(&trial_resid) } else { f64::INFINITY };

        if new_obj.is_finite() && new_obj < objective {
            let decrease = (objective - new_obj) / objective;
            let predicted_resid = jac.mul_vec(&step);
            let predicted: f64 = objective - resid.iter().zip(&predicted_resid).map(|(r, d)| (r + d).powi(2)).sum::<f64>();
            let rho = if predicted > 0.0 { (objective - new_obj) / predicted } else { 0.0 };
            let step_norm: f64 = step.iter().zip(&scale).map(|(d, s)| (d * s).powi(2)).sum::<f64>().sqrt();
            let param_norm: f64 = params.iter().zip(&scale).map(|(x, s)| (x * s).powi(2)).sum::<f64>().sqrt();
            let small_step = step_norm <= options.step_tolerance * (param_norm + options.step_tolerance);
            core::mem::swap(&mut params, &mut trial);
            core::mem::swap(&mut resid, &mut trial_resid);
            objective = new_obj;
            lambda = (lambda * (1.0 / 3.0f64).max(1.0 - (2.0 * rho - 1.0).powi(3))).max(1e-15);
            nu = 2.0;
            need_jacobian = true;
            if decrease < options.rel_tolerance || small_step {
                return Ok(LmReport { params, objective, iterations: iteration, converged: true });
            }
        } else {
            lambda *= nu;
            nu *= 2.0;
            if lambda > MAX_DAMPING {
                // No descent direction left at this point: stationary.
                return Ok(LmReport { params, objective, iterations: iteration, converged: true });
            }
        }
    }
    Ok(LmReport { params, objective, iterations: options.max_iterations, converged: false })
}
