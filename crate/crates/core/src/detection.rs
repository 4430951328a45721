//! BPSK over a symbol-spaced channel: transmission with AWGN, the 1-tap and
//! 2-tap SIC receivers, the ISI-free lower-bound channel, and the analytic
//! Rayleigh reference.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Complex, DiscreteChannel, Error, Result};

pub const DEFAULT_FRAME_LEN: usize = 100;

/// A block of BPSK symbols, `s = 1 − 2b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    bits: Vec<u8>,
}

impl Frame {
    pub fn from_bits(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "bits must be 0 or 1");
        Frame { bits }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Frame {
            bits: (0..len).map(|_| u8::from(rng.random::<bool>())).collect(),
        }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn symbols(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| 1.0 - 2.0 * f64::from(b)).collect()
    }

    /// Number of positions where `detected` differs.
    pub fn bit_errors(&self, detected: &[u8]) -> usize {
        self.bits.iter().zip(detected).filter(|(a, b)| a != b).count()
    }
}

/// Average received SNR `γ̄` in dB: power of the noise-free received signal
/// over noise power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPoint {
    pub gamma_bar_db: f64,
}

impl SnrPoint {
    pub fn new(gamma_bar_db: f64) -> Self {
        SnrPoint { gamma_bar_db }
    }

    pub fn linear(&self) -> f64 {
        libm::pow(10.0, self.gamma_bar_db / 10.0)
    }

    /// Noise level for a signal whose ensemble-average tap energy is
    /// `signal_power`.
    pub fn noise(&self, signal_power: f64) -> NoiseLevel {
        NoiseLevel::new(signal_power / self.linear())
    }
}

/// Variance of the circular complex Gaussian noise per sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseLevel {
    variance: f64,
}

impl NoiseLevel {
    pub fn new(variance: f64) -> Self {
        assert!(variance >= 0.0, "noise variance must be non-negative");
        NoiseLevel { variance }
    }

    pub const fn silent() -> Self {
        NoiseLevel { variance: 0.0 }
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Standard deviation of each of the real and imaginary parts.
    pub fn component_sd(&self) -> f64 {
        libm::sqrt(0.5 * self.variance)
    }
}

/// Unit-variance complex Gaussian noise, to be scaled per SNR point.
pub fn unit_noise<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<Complex> {
    let scale = core::f64::consts::FRAC_1_SQRT_2;
    (0..len)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(re * scale, im * scale)
        })
        .collect()
}

/// Noise-free received sequence `Σ_m c_m s_{k−m}`, zero outside the frame.
pub fn convolve(symbols: &[f64], channel: &DiscreteChannel) -> Vec<Complex> {
    let n = symbols.len() as isize;
    let k_max = channel.k_max() as isize;
    let taps = channel.taps();
    (0..n)
        .map(|k| {
            let mut acc = Complex::new(0.0, 0.0);
            for m in -k_max..=k_max {
                let i = k - m;
                if (0..n).contains(&i) {
                    acc += taps[(m + k_max) as usize] * symbols[i as usize];
                }
            }
            acc
        })
        .collect()
}

/// `r_k = Σ_m c_m s_{k−m} + w_k`.
pub fn transmit<R: Rng + ?Sized>(
    frame: &Frame,
    channel: &DiscreteChannel,
    noise: NoiseLevel,
    rng: &mut R,
) -> Vec<Complex> {
    let mut r = convolve(&frame.symbols(), channel);
    add_noise(&mut r, noise, rng);
    r
}

/// `r_k = g·s_k + w_k`: the mediumband channel with its ISI removed.
pub fn lower_bound_transmit<R: Rng + ?Sized>(
    frame: &Frame,
    g: Complex,
    noise: NoiseLevel,
    rng: &mut R,
) -> Vec<Complex> {
    let mut r: Vec<Complex> = frame.symbols().iter().map(|&s| g * s).collect();
    add_noise(&mut r, noise, rng);
    r
}

fn add_noise<R: Rng + ?Sized>(r: &mut [Complex], noise: NoiseLevel, rng: &mut R) {
    if noise.variance() == 0.0 {
        return;
    }
    let sd = noise.component_sd();
    for v in r.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v += Complex::new(re * sd, im * sd);
    }
}

#[inline]
fn decide(metric: f64) -> u8 {
    // Ties at exactly zero go to bit 0.
    u8::from(metric < 0.0)
}

/// Symbol-by-symbol coherent decision on `Re(conj(g)·r_k)`, all ISI treated
/// as noise.
pub fn detect_1tap(received: &[Complex], g: Complex) -> Result<Vec<u8>> {
    if g == Complex::new(0.0, 0.0) {
        return Err(Error::DegenerateChannel);
    }
    let gc = g.conj();
    Ok(received.iter().map(|r| decide((gc * r).re)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SicOutput {
    pub bits: Vec<u8>,
    /// Set when `|c_j| > |c_0|`, i.e. the cancelled tap is stronger than the
    /// one detected on.
    pub ordering_violated: bool,
}

/// Two-tap receiver with successive interference cancellation.
///
/// Symbols are decided in the order that makes the interfering symbol
/// `s_{k−j}` available before `s_k` (forward for a postcursor `j > 0`,
/// backward for a precursor `j < 0`); its contribution `c_j·ŝ_{k−j}` is
/// subtracted and the residual decided as in [`detect_1tap`].
pub fn detect_2tap_sic(received: &[Complex], c0: Complex, cj: Complex, j: isize) -> Result<SicOutput> {
    if c0 == Complex::new(0.0, 0.0) {
        return Err(Error::DegenerateChannel);
    }
    if j == 0 {
        return Err(Error::Config("interferer offset must be nonzero"));
    }
    let n = received.len() as isize;
    let gc = c0.conj();
    let mut decided = vec![0.0f64; received.len()];
    let mut bits = vec![0u8; received.len()];
    let mut step = |k: isize| {
        let i = k - j;
        let prior = if (0..n).contains(&i) { decided[i as usize] } else { 0.0 };
        let residual = received[k as usize] - cj * prior;
        let b = decide((gc * residual).re);
        bits[k as usize] = b;
        decided[k as usize] = 1.0 - 2.0 * f64::from(b);
    };
    if j > 0 {
        (0..n).for_each(&mut step);
    } else {
        (0..n).rev().for_each(&mut step);
    }
    Ok(SicOutput {
        bits,
        ordering_violated: cj.norm_sqr() > c0.norm_sqr(),
    })
}

/// Average BER of coherent BPSK over ISI-free Rayleigh fading with
/// `E|h|² = 1`: `½(1 − √(γ̄/(1+γ̄)))`.
pub fn rayleigh_ber_analytic(gamma_bar_db: f64) -> f64 {
    let g = libm::pow(10.0, gamma_bar_db / 10.0);
    0.5 * (1.0 - libm::sqrt(g / (1.0 + g)))
}
