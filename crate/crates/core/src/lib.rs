//! Wind turbine power-curve modelling on quantized SCADA data.
//!
//! The crate is `no_std` (with `alloc`) and contains only the numerical
//! pipeline: cleaning rules, static curve classes, order selection, the
//! environmental enhancement, residual scaling with a Gaussian band, the
//! ARMA dynamic layer, horizon evaluation and a seeded synthetic generator.
//! File formats and the command-line front end live in the `wtpc` crate.
//!
//! Typical flow:
//!
//! 1. [`scada::clean`] raw records into a [`scada::CleanDataset`].
//! 2. Fit a static curve with [`curves::fit`] or sweep orders with
//!    [`selection::select_order`].
//! 3. Add angle and temperature with [`environmental::fit_environmental`].
//! 4. Build a [`residuals::ResidualProfile`] and fit the dynamic layer with
//!    [`dynamic::DynamicModel::fit`].
//! 5. Forecast with [`dynamic::DynamicModel::predict_power`] or score with
//!    [`evaluation::mse_at_horizon`].
#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod curves;
pub mod dynamic;
pub mod environmental;
mod error;
pub mod estimation;
pub mod evaluation;
pub mod linalg;
pub mod optim;
pub mod residuals;
pub mod scada;
pub mod selection;
pub mod stats;
pub mod synthetic;
mod wind;

pub use error::{Error, Result};
pub use wind::WindBin;

/// Anything that maps environmental inputs to a power prediction in kW.
pub trait PowerCurve {
    fn predict(&self, wind: f64, angle: f64, temperature: f64) -> Result<f64>;
}
