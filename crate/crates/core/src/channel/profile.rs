use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::Rng;

use crate::{Complex, Error, Result};

/// Parameters of the random multipath environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub n_paths: usize,
    /// Delay spread `T_m` in seconds.
    pub delay_spread: f64,
    /// Symbol period `T_s` in seconds.
    pub symbol_period: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            n_paths: 10,
            delay_spread: 0.0,
            symbol_period: 1.0,
        }
    }
}

impl ChannelParams {
    /// Environment whose delay spread is `pds` percent of the symbol period.
    pub fn from_pds(n_paths: usize, pds_percent: f64, symbol_period: f64) -> Result<Self> {
        if !(pds_percent >= 0.0 && pds_percent.is_finite()) {
            return Err(Error::Config("percentage delay spread must be non-negative"));
        }
        let params = ChannelParams {
            n_paths,
            delay_spread: pds_percent / 100.0 * symbol_period,
            symbol_period,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::Config("at least one multipath component is required"));
        }
        if !(self.delay_spread >= 0.0 && self.delay_spread.is_finite()) {
            return Err(Error::Config("delay spread must be non-negative"));
        }
        if !(self.symbol_period > 0.0 && self.symbol_period.is_finite()) {
            return Err(Error::Config("symbol period must be positive"));
        }
        Ok(())
    }

    pub fn pds(&self) -> f64 {
        self.delay_spread / self.symbol_period * 100.0
    }
}

/// One multipath component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathComponent {
    pub amplitude: f64,
    /// Radians in `[0, 2π)`.
    pub phase: f64,
    /// Seconds in `[0, T_m]`.
    pub delay: f64,
}

impl PathComponent {
    /// `α·e^{−jφ}`.
    pub fn gain(&self) -> Complex {
        Complex::from_polar(self.amplitude, -self.phase)
    }
}

/// A single realization of the multipath environment.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipathProfile {
    paths: Vec<PathComponent>,
    delay_spread: f64,
    symbol_period: f64,
}

impl MultipathProfile {
    pub fn new(paths: Vec<PathComponent>, delay_spread: f64, symbol_period: f64) -> Result<Self> {
        ChannelParams {
            n_paths: paths.len(),
            delay_spread,
            symbol_period,
        }
        .validate()?;
        for p in &paths {
            if !(p.amplitude >= 0.0 && p.amplitude.is_finite()) {
                return Err(Error::Config("path amplitude must be non-negative"));
            }
            if !(0.0..TAU).contains(&p.phase) {
                return Err(Error::Config("path phase must lie in [0, 2π)"));
            }
            if !(0.0..=delay_spread).contains(&p.delay) {
                return Err(Error::Config("path delay must lie in [0, T_m]"));
            }
        }
        Ok(MultipathProfile {
            paths,
            delay_spread,
            symbol_period,
        })
    }

    pub fn paths(&self) -> &[PathComponent] {
        &self.paths
    }

    pub fn delay_spread(&self) -> f64 {
        self.delay_spread
    }

    pub fn symbol_period(&self) -> f64 {
        self.symbol_period
    }

    /// `Σ α_n²`.
    pub fn total_power(&self) -> f64 {
        self.paths.iter().map(|p| p.amplitude * p.amplitude).sum()
    }
}

/// Draws a profile: uniform delays on `[0, T_m]`, uniform phases, and
/// Rayleigh amplitudes with `E[α²] = 1/N` so the average powers sum to one.
pub fn sample_profile<R: Rng + ?Sized>(params: &ChannelParams, rng: &mut R) -> Result<MultipathProfile> {
    params.validate()?;
    let n = params.n_paths;
    let inv_n = 1.0 / n as f64;
    let tm = params.delay_spread;
    let paths = (0..n)
        .map(|_| {
            // 1 − U lies in (0, 1], keeping the logarithm finite.
            let u: f64 = 1.0 - rng.random::<f64>();
            let amplitude = libm::sqrt(-libm::log(u) * inv_n);
            let phase = rng.random::<f64>() * TAU;
            let delay = if tm > 0.0 { rng.random_range(0.0..=tm) } else { 0.0 };
            PathComponent {
                amplitude,
                phase: if phase >= TAU { 0.0 } else { phase },
                delay,
            }
        })
        .collect();
    Ok(MultipathProfile {
        paths,
        delay_spread: tm,
        symbol_period: params.symbol_period,
    })
}

/// Narrowband fading factor `h = Σ α_n e^{−jφ_n}`.
pub fn narrowband_factor(profile: &MultipathProfile) -> Complex {
    profile.paths.iter().map(PathComponent::gain).sum()
}

/// Percentage delay spread `100·T_m/T_s`.
pub fn pds(delay_spread: f64, symbol_period: f64) -> Result<f64> {
    if !(symbol_period > 0.0) {
        return Err(Error::Config("symbol period must be positive"));
    }
    if !(delay_spread >= 0.0) {
        return Err(Error::Config("delay spread must be non-negative"));
    }
    Ok(delay_spread / symbol_period * 100.0)
}
