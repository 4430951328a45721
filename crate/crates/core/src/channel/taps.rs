use alloc::vec;
use alloc::vec::Vec;

use super::{MultipathProfile, SamplingInstants};
use crate::{Complex, PulseShape};

/// Symbol-spaced channel seen by the detector.
///
/// Tap `k` is the contribution of the symbol sent `k` periods earlier to the
/// current sample: `c_k = Re Σ γ_n p(kT_s + t_I − τ_n) + j Im Σ γ_n p(kT_s + t_Q − τ_n)`.
/// With a joint instant this is the usual complex tap.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteChannel {
    taps: Vec<Complex>,
    k_max: usize,
    instants: SamplingInstants,
    sir_db: f64,
}

impl DiscreteChannel {
    /// Taps for `k ∈ [−k_max, k_max]`, indexed from zero at `−k_max`.
    pub fn from_taps(taps: Vec<Complex>, instants: SamplingInstants) -> Self {
        assert!(taps.len() % 2 == 1, "tap vector must be centred on k = 0");
        let k_max = taps.len() / 2;
        let mut ch = DiscreteChannel {
            taps,
            k_max,
            instants,
            sir_db: 0.0,
        };
        ch.sir_db = ch.compute_sir_db();
        ch
    }

    /// Flat channel `r_k = g·s_k`.
    pub fn single_tap(g: Complex) -> Self {
        DiscreteChannel::from_taps(vec![g], SamplingInstants::joint(0.0))
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn taps(&self) -> &[Complex] {
        &self.taps
    }

    /// `c_k`, zero outside the stored extent.
    pub fn tap(&self, k: isize) -> Complex {
        let idx = k + self.k_max as isize;
        if idx < 0 || idx as usize >= self.taps.len() {
            Complex::new(0.0, 0.0)
        } else {
            self.taps[idx as usize]
        }
    }

    /// Desired fading factor `g = c_0`.
    pub fn desired(&self) -> Complex {
        self.taps[self.k_max]
    }

    pub fn instants(&self) -> SamplingInstants {
        self.instants
    }

    /// `Σ_k |c_k|²`.
    pub fn total_energy(&self) -> f64 {
        self.taps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ_{k≠0} |c_k|²`.
    pub fn interference_energy(&self) -> f64 {
        self.taps
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.k_max)
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    /// Signal-to-interference ratio in dB; `+∞` for an ISI-free channel.
    pub fn sir_db(&self) -> f64 {
        self.sir_db
    }

    /// Largest-magnitude tap other than `c_0`, with its offset. Ties go to
    /// the smallest `|k|`, postcursor first.
    pub fn strongest_interferer(&self) -> Option<(isize, Complex)> {
        let mut best: Option<(isize, Complex)> = None;
        for d in 1..=self.k_max as isize {
            for k in [d, -d] {
                let c = self.tap(k);
                if best.is_none_or(|(_, b)| c.norm_sqr() > b.norm_sqr()) {
                    best = Some((k, c));
                }
            }
        }
        best
    }

    fn compute_sir_db(&self) -> f64 {
        let interference = self.interference_energy();
        let desired = self.desired().norm_sqr();
        if interference == 0.0 {
            f64::INFINITY
        } else {
            10.0 * libm::log10(desired / interference)
        }
    }
}

/// Reduces `profile` to symbol-spaced taps at the given sampling instants.
///
/// The tap extent covers every `k` with a nonzero pulse contribution, so no
/// pulse energy is dropped beyond the pulse's own truncation.
pub fn effective_taps(
    profile: &MultipathProfile,
    pulse: &PulseShape,
    instants: impl Into<SamplingInstants>,
) -> DiscreteChannel {
    let instants = instants.into();
    let ts = profile.symbol_period();
    let half = 0.5 * f64::from(pulse.span());
    let mut max_offset: f64 = 0.0;
    for p in profile.paths() {
        max_offset = max_offset
            .max(libm::fabs(instants.in_phase - p.delay))
            .max(libm::fabs(instants.quadrature - p.delay));
    }
    let k_max = libm::ceil(half + max_offset / ts) as usize;
    let mut taps = vec![Complex::new(0.0, 0.0); 2 * k_max + 1];
    let first = -(k_max as f64) * ts;
    for p in profile.paths() {
        let gain = p.gain();
        pulse.accumulate_grid(first + instants.in_phase, ts, p.delay, Complex::new(gain.re, 0.0), &mut taps);
        pulse.accumulate_grid(first + instants.quadrature, ts, p.delay, Complex::new(0.0, gain.im), &mut taps);
    }
    DiscreteChannel::from_taps(taps, instants)
}
