use alloc::string::String;

use crate::curves::ModelClass;
use crate::WindBin;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("every record was discarded during cleaning")]
    EmptyAfterCleaning,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("negative wind speed {0}")]
    NegativeWind(f64),
    #[error("model parameters contain NaN")]
    NanParameter,
    #[error("rank-deficient design matrix for {class} model of order {order}")]
    RankDeficient { class: ModelClass, order: usize },
    #[error("least squares solver did not converge (final objective {objective})")]
    NotConverged { objective: f64 },
    #[error("knot vector decreases at position {0}")]
    DecreasingKnots(usize),
    #[error("basis index {index} outside 1..={max}")]
    BasisIndex { index: usize, max: usize },
    #[error("MSE must be positive, got {0}")]
    NonPositiveMse(f64),
    #[error("temperature column is constant; c_T is not identifiable")]
    ConstantTemperature,
    #[error("need at least {needed} samples, got {given}")]
    InsufficientSamples { given: usize, needed: usize },
    #[error("non-finite sample value")]
    NonFinite,
    #[error("zero residual scale in wind bin {0}")]
    ZeroSigma(WindBin),
    #[error("no Gaussian band at level {0}")]
    NoGaussianBand(f64),
    #[error("insufficient data for dynamic layer: {given} in-band samples, need {needed}")]
    InsufficientDynamicData { given: usize, needed: usize },
    #[error("invalid ARMA specification: {0}")]
    InvalidArma(String),
    #[error("every order in the grid failed to fit")]
    AllOrdersFailed,
    #[error("horizon of {steps} steps does not fit a series of length {len}")]
    HorizonTooLong { steps: usize, len: usize },
    #[error("series of length {len} is shorter than the long autoregression order {order}")]
    SeriesTooShort { len: usize, order: usize },
}
