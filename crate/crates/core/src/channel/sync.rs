use alloc::vec;
use alloc::vec::Vec;

use super::{effective_taps, MultipathProfile};
use crate::{Complex, PulseShape};

/// Coarse search resolution, in fractions of a symbol period.
pub const GRID_DIVISIONS: usize = 128;

/// Refinement stops at this fraction of a symbol period.
pub const REFINE_TOLERANCE: f64 = 1e-6;

/// How the receiver picks its sampling instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TimingRule {
    /// In-phase and quadrature rails are each sampled where their own
    /// desired-tap amplitude peaks. A BPSK symbol occupies both rails, so
    /// each rail is free to pick its best instant.
    #[default]
    PerRail,
    /// One instant for both rails, maximizing `|c_0|²`.
    JointPower,
    /// One instant for both rails, maximizing `|c_0|² / Σ_{k≠0} |c_k|²`.
    MaxSir,
}

impl TimingRule {
    pub fn name(self) -> &'static str {
        match self {
            TimingRule::PerRail => "per-rail",
            TimingRule::JointPower => "joint-power",
            TimingRule::MaxSir => "max-sir",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "per-rail" => Some(TimingRule::PerRail),
            "joint-power" => Some(TimingRule::JointPower),
            "max-sir" => Some(TimingRule::MaxSir),
            _ => None,
        }
    }
}

/// Absolute sampling instants (seconds) of the desired symbol on the
/// in-phase and quadrature rails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingInstants {
    pub in_phase: f64,
    pub quadrature: f64,
}

impl SamplingInstants {
    pub fn joint(t: f64) -> Self {
        SamplingInstants {
            in_phase: t,
            quadrature: t,
        }
    }

    /// Instants reduced into `[0, T_s)`.
    pub fn timing_offsets(&self, symbol_period: f64) -> (f64, f64) {
        let wrap = |t: f64| {
            let r = t % symbol_period;
            if r < 0.0 {
                r + symbol_period
            } else {
                r
            }
        };
        (wrap(self.in_phase), wrap(self.quadrature))
    }
}

impl From<f64> for SamplingInstants {
    fn from(t: f64) -> Self {
        SamplingInstants::joint(t)
    }
}

/// Desired-tap value `c_0(t) = Σ_n γ_n p(t − τ_n)` at sampling instant `t`.
pub fn desired_tap_at(profile: &MultipathProfile, pulse: &PulseShape, t: f64) -> Complex {
    profile
        .paths()
        .iter()
        .map(|p| p.gain() * pulse.eval(t - p.delay))
        .sum()
}

/// Search window for the sampling instant: one symbol period either side
/// of the delay support.
pub fn search_window(profile: &MultipathProfile) -> (f64, f64) {
    let ts = profile.symbol_period();
    (-ts, profile.delay_spread() + ts)
}

/// Synchronizes the receiver to `profile`.
///
/// A grid search at `T_s/128` over [`search_window`] locates the best
/// instant, then Brent's method (golden section with parabolic steps) refines it to `T_s·1e−6`.
pub fn synchronize(profile: &MultipathProfile, pulse: &PulseShape, rule: TimingRule) -> SamplingInstants {
    let ts = profile.symbol_period();
    let (lo, hi) = search_window(profile);
    let step = ts / GRID_DIVISIONS as f64;
    let points = libm::ceil((hi - lo) / step) as usize + 1;

    match rule {
        TimingRule::PerRail | TimingRule::JointPower => {
            let mut grid = vec![Complex::new(0.0, 0.0); points];
            for p in profile.paths() {
                pulse.accumulate_grid(lo, step, p.delay, p.gain(), &mut grid);
            }
            let tol = REFINE_TOLERANCE * ts;
            let refine = |objective: &dyn Fn(Complex) -> f64| {
                let best = argmax(grid.iter().map(|c| objective(*c)));
                let a = lo + step * best.saturating_sub(1) as f64;
                let b = (lo + step * (best + 1) as f64).min(hi);
                brent_max(
                    |t| objective(desired_tap_at(profile, pulse, t)),
                    a,
                    b,
                    lo + step * best as f64,
                    tol,
                )
            };
            if rule == TimingRule::PerRail {
                SamplingInstants {
                    in_phase: refine(&|c: Complex| libm::fabs(c.re)),
                    quadrature: refine(&|c: Complex| libm::fabs(c.im)),
                }
            } else {
                SamplingInstants::joint(refine(&|c: Complex| c.norm_sqr()))
            }
        }
        TimingRule::MaxSir => {
            let sir = |t: f64| {
                let ch = effective_taps(profile, pulse, SamplingInstants::joint(t));
                let i = ch.interference_energy();
                let d = ch.desired().norm_sqr();
                if i > 0.0 {
                    d / i
                } else if d > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            };
            let values: Vec<f64> = (0..points).map(|j| sir(lo + step * j as f64)).collect();
            let best = argmax(values.iter().copied());
            if values[best].is_infinite() {
                return SamplingInstants::joint(lo + step * best as f64);
            }
            let a = lo + step * best.saturating_sub(1) as f64;
            let b = (lo + step * (best + 1) as f64).min(hi);
            SamplingInstants::joint(brent_max(sir, a, b, lo + step * best as f64, REFINE_TOLERANCE * ts))
        }
    }
}

/// Index of the first maximum.
fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

/// Maximizes `f` on `[a, b]` by Brent's method: golden-section steps with
/// parabolic interpolation when the fit is trustworthy. Returns the best
/// point seen, never worse than `seed`.
fn brent_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, seed: f64, tol: f64) -> f64 {
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    let g = |t: f64| -f(t);
    let (mut x, mut w, mut v) = (seed, seed, seed);
    let mut fx = g(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let tol1 = 0.5 * tol;
        let tol2 = 2.0 * tol1;
        if libm::fabs(x - m) <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if libm::fabs(e) > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = libm::fabs(q);
            if libm::fabs(p) < libm::fabs(0.5 * q * e) && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLDEN * e;
        }
        let u = if libm::fabs(d) >= tol1 { x + d } else if d > 0.0 { x + tol1 } else { x - tol1 };
        let fu = g(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    x
}
