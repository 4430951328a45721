//! Composite transmit/receive pulse.
//!
//! A square-root raised-cosine filter at both ends of the link cascades into
//! a raised-cosine pulse, which is all the symbol-spaced channel model needs.

use core::f64::consts::PI;

use crate::{Complex, Error, Result};

/// Distance (in symbol periods) from a removable singularity of the closed
/// form inside which the analytic limit is used instead.
const SINGULAR_GUARD: f64 = 1e-9;

/// Grid evaluation falls back to the direct formula this close to a
/// singular point, where the recurrence loses relative precision.
const GRID_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseShape {
    rolloff: f64,
    span: u32,
    oversampling: u32,
    symbol_period: f64,
}

impl Default for PulseShape {
    fn default() -> Self {
        PulseShape {
            rolloff: 0.22,
            span: 12,
            oversampling: 8,
            symbol_period: 1.0,
        }
    }
}

impl PulseShape {
    /// `span` is the full filter length in symbol periods; the pulse is zero
    /// for `|t| > span/2 · T_s`.
    pub fn new(rolloff: f64, span: u32, oversampling: u32, symbol_period: f64) -> Result<Self> {
        if !(rolloff > 0.0 && rolloff <= 1.0) {
            return Err(Error::Config("roll-off must lie in (0, 1]"));
        }
        if span < 2 {
            return Err(Error::Config("pulse span must be at least 2 symbol periods"));
        }
        if oversampling == 0 {
            return Err(Error::Config("oversampling must be at least 1"));
        }
        if !(symbol_period > 0.0 && symbol_period.is_finite()) {
            return Err(Error::Config("symbol period must be positive"));
        }
        Ok(PulseShape {
            rolloff,
            span,
            oversampling,
            symbol_period,
        })
    }

    pub fn rolloff(&self) -> f64 {
        self.rolloff
    }

    pub fn span(&self) -> u32 {
        self.span
    }

    pub fn oversampling(&self) -> u32 {
        self.oversampling
    }

    pub fn symbol_period(&self) -> f64 {
        self.symbol_period
    }

    /// Half support in seconds.
    pub fn half_width(&self) -> f64 {
        0.5 * f64::from(self.span) * self.symbol_period
    }

    /// Raised-cosine value at time `t` (seconds).
    pub fn eval(&self, t: f64) -> f64 {
        raised_cosine(t / self.symbol_period, self.rolloff, 0.5 * f64::from(self.span))
    }

    /// Accumulates `weight · p(start + j·step − delay)` into `out[j]`.
    ///
    /// Sine and cosine terms advance by phasor rotation, so a grid costs a
    /// handful of multiplications per point instead of two transcendental
    /// calls.
    pub fn accumulate_grid(
        &self,
        start: f64,
        step: f64,
        delay: f64,
        weight: Complex,
        out: &mut [Complex],
    ) {
        let ts = self.symbol_period;
        let beta = self.rolloff;
        let half = 0.5 * f64::from(self.span);
        let x0 = (start - delay) / ts;
        let dx = step / ts;
        // Only grid points inside the pulse support contribute.
        let first = libm::ceil((-half - x0) / dx).max(0.0);
        let last = libm::floor((half - x0) / dx).min(out.len() as f64 - 1.0);
        if last < first {
            return;
        }
        let (first, last) = (first as usize, last as usize);
        let x_first = x0 + dx * first as f64;

        let (s0, c0) = libm::sincos(PI * x_first);
        let mut sinc_phasor = Complex::new(c0, s0);
        let (s1, c1) = libm::sincos(PI * dx);
        let sinc_rot = Complex::new(c1, s1);
        let (s2, c2) = libm::sincos(PI * beta * x_first);
        let mut cos_phasor = Complex::new(c2, s2);
        let (s3, c3) = libm::sincos(PI * beta * dx);
        let cos_rot = Complex::new(c3, s3);
        let four_beta_sq = 4.0 * beta * beta;

        for (j, acc) in out[first..=last].iter_mut().enumerate() {
            let x = x_first + dx * j as f64;
            let den = 1.0 - four_beta_sq * x * x;
            // Near integers (sin πx → 0) or the roll-off singularity the
            // ratio loses precision; use the direct form there.
            let p = if libm::fabs(sinc_phasor.im) < GRID_GUARD || libm::fabs(den) < GRID_GUARD {
                raised_cosine(x, beta, half)
            } else {
                sinc_phasor.im * cos_phasor.re / (PI * x * den)
            };
            *acc += weight * p;
            sinc_phasor *= sinc_rot;
            cos_phasor *= cos_rot;
        }
    }
}

/// Raised cosine in units of the symbol period, truncated to `|x| ≤ half`.
fn raised_cosine(x: f64, beta: f64, half: f64) -> f64 {
    let ax = libm::fabs(x);
    if ax > half {
        return 0.0;
    }
    if ax == 0.0 {
        return 1.0;
    }
    if x == libm::trunc(x) {
        // Nyquist zero crossings, exact rather than sin(πk) round-off.
        return 0.0;
    }
    let singular = 0.5 / beta;
    if libm::fabs(ax - singular) < SINGULAR_GUARD {
        return 0.25 * PI * sinc(singular);
    }
    sinc(x) * libm::cos(PI * beta * x) / (1.0 - 4.0 * beta * beta * x * x)
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        libm::sin(PI * x) / (PI * x)
    }
}
