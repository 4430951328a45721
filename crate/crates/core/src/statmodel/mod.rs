//! Gaussian-hole model of the desired fading factor's real (or imaginary)
//! part: density, exact sampling, moments, maximum-likelihood fitting and a
//! bimodality statistic.

mod dip;
mod fit;
mod params;
mod sampler;

pub use dip::{dip_statistic, DipStatistic, BIMODAL_THRESHOLD, DIP_BANDWIDTH_FACTOR, MIN_DIP_SAMPLES};
pub use fit::{fit, fit_with, log_likelihood, FitOptions, FitResult, MIN_FIT_SAMPLES};
pub use params::{GaussianHoleParams, Moments};
