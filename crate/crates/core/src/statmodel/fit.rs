//! Maximum-likelihood fitting of the Gaussian-hole density.
//!
//! The search runs Nelder–Mead in an unconstrained coordinate system
//! `(logit K, ln σ_O², logit(σ_I²/σ_O²))`, which maps every point onto a
//! valid parameter set, so the simplex can never leave the valid region.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::GaussianHoleParams;
use crate::{Error, Result};

/// Fewest samples `fit` accepts.
pub const MIN_FIT_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_evaluations: usize,
    /// Convergence on the spread of simplex log-likelihoods.
    pub f_tolerance: f64,
    /// Convergence on the simplex diameter (unconstrained coordinates).
    pub x_tolerance: f64,
    pub initial_k: f64,
    /// Initial `σ_I²` as a fraction of the sample variance.
    pub initial_hole_fraction: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_evaluations: 4000,
            f_tolerance: 1e-6,
            x_tolerance: 1e-7,
            initial_k: 0.9,
            initial_hole_fraction: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub params: GaussianHoleParams,
    pub log_likelihood: f64,
    pub evaluations: usize,
}

/// Exact log-likelihood of `samples` under `params`.
pub fn log_likelihood(params: &GaussianHoleParams, samples: &[f64]) -> f64 {
    samples.iter().map(|&x| libm::log(params.pdf(x))).sum()
}

pub fn fit(samples: &[f64]) -> Result<FitResult> {
    fit_with(samples, &FitOptions::default())
}

pub fn fit_with(samples: &[f64], options: &FitOptions) -> Result<FitResult> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: samples.len(),
            need: MIN_FIT_SAMPLES,
        });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Params("samples must be finite"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let variance = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    if !(variance > 0.0) {
        return Err(Error::Params("samples have zero variance"));
    }
    let half_sq: Vec<f64> = samples.iter().map(|x| 0.5 * x * x).collect();

    let objective = |theta: &[f64; 3]| -> f64 {
        let p = decode(theta);
        -log_likelihood_half_sq(&p, &half_sq)
    };

    let start = encode(
        options.initial_k,
        options.initial_hole_fraction * variance,
        variance,
    );
    let mut evaluations = 0;
    let mut best = nelder_mead(&objective, start, options, &mut evaluations);
    // Restart from the optimum until a fresh simplex no longer improves it.
    for _ in 0..4 {
        if evaluations >= options.max_evaluations {
            break;
        }
        let again = nelder_mead(&objective, best.0, options, &mut evaluations);
        let improved = again.1 < best.1 - options.f_tolerance;
        if again.1 < best.1 {
            best = again;
        }
        if !improved {
            let result = FitResult {
                params: decode(&best.0),
                log_likelihood: -best.1,
                evaluations,
            };
            return if result.log_likelihood.is_finite() {
                Ok(result)
            } else {
                Err(Error::FitFailed { best: result })
            };
        }
    }
    Err(Error::FitFailed {
        best: FitResult {
            params: decode(&best.0),
            log_likelihood: -best.1,
            evaluations,
        },
    })
}

fn log_likelihood_half_sq(p: &GaussianHoleParams, half_sq: &[f64]) -> f64 {
    let l0 = p.lambda0();
    let l1 = p.lambda1();
    let k = p.k();
    let a0 = 1.0 / (l0 * l0);
    let norm = libm::log(libm::sqrt(2.0 * PI) * (l0 - k * l1));
    if p.is_gaussian() {
        return -half_sq.iter().map(|h| h * a0).sum::<f64>() - half_sq.len() as f64 * norm;
    }
    let a1 = 1.0 / (l1 * l1);
    let mut total = 0.0;
    for &h in half_sq {
        let v = libm::exp(-h * a0) - k * libm::exp(-h * a1);
        if v <= 0.0 {
            return f64::NEG_INFINITY;
        }
        total += libm::log(v);
    }
    total - half_sq.len() as f64 * norm
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-z))
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    libm::log(p / (1.0 - p))
}

fn encode(k: f64, sigma_i_sq: f64, sigma_o_sq: f64) -> [f64; 3] {
    [logit(k), libm::log(sigma_o_sq), logit(sigma_i_sq / sigma_o_sq)]
}

fn decode(theta: &[f64; 3]) -> GaussianHoleParams {
    let k = logistic(theta[0]);
    let so = libm::exp(theta[1]);
    let si = so * logistic(theta[2]);
    GaussianHoleParams::new(k, si, so).unwrap_or_else(|_| {
        // Only reachable through floating-point saturation at the edges.
        GaussianHoleParams::new(k.min(1.0), si.min(so * 0.999_999), so.max(f64::MIN_POSITIVE))
            .expect("clamped parameters are valid")
    })
}

/// Minimizes `f` with the standard Nelder–Mead moves. Returns the best
/// vertex and its value.
fn nelder_mead(
    f: &impl Fn(&[f64; 3]) -> f64,
    start: [f64; 3],
    options: &FitOptions,
    evaluations: &mut usize,
) -> ([f64; 3], f64) {
    const STEP: f64 = 0.5;
    let count = core::cell::Cell::new(*evaluations);
    let eval = |x: &[f64; 3]| {
        count.set(count.get() + 1);
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: [([f64; 3], f64); 4] = [(start, 0.0); 4];
    for (i, vertex) in simplex.iter_mut().enumerate().skip(1) {
        vertex.0[i - 1] += STEP;
    }
    for vertex in simplex.iter_mut() {
        vertex.1 = eval(&vertex.0);
    }

    while count.get() < options.max_evaluations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[3].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|v| (0..3).map(|d| libm::fabs(v.0[d] - simplex[0].0[d])).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.is_finite() && spread <= options.f_tolerance && diameter <= options.x_tolerance {
            break;
        }
        if spread.is_finite() && spread <= options.f_tolerance * 1e-3 {
            break;
        }

        let mut centroid = [0.0; 3];
        for v in &simplex[..3] {
            for (c, x) in centroid.iter_mut().zip(v.0) {
                *c += x / 3.0;
            }
        }
        let along = |t: f64| -> [f64; 3] {
            let mut x = [0.0; 3];
            for d in 0..3 {
                x[d] = centroid[d] + t * (simplex[3].0[d] - centroid[d]);
            }
            x
        };

        let reflected = along(-1.0);
        let fr = eval(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(-2.0);
            let fe = eval(&expanded);
            simplex[3] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < simplex[3].1 {
                let x = along(-0.5);
                let v = eval(&x);
                (x, v)
            } else {
                let x = along(0.5);
                let v = eval(&x);
                (x, v)
            };
            if fc < simplex[3].1.min(fr) {
                simplex[3] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for vertex in simplex.iter_mut().skip(1) {
                    for (x, b) in vertex.0.iter_mut().zip(best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    vertex.1 = eval(&vertex.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    *evaluations = count.get();
    simplex[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn too_few_samples() {
        let err = fit(&vec![0.1; 100]).unwrap_err();
        assert_eq!(err, Error::InsufficientSamples { got: 100, need: MIN_FIT_SAMPLES });
        assert!(fit(&[]).is_err());
    }

    #[test]
    fn fast_likelihood_matches_pdf() {
        let p = GaussianHoleParams::new(0.93, 0.003, 0.46).unwrap();
        let xs = [-1.3, -0.2, -0.01, 0.0, 0.04, 0.5, 2.2];
        let half: Vec<f64> = xs.iter().map(|x| 0.5 * x * x).collect();
        let fast = log_likelihood_half_sq(&p, &half);
        assert!((fast - log_likelihood(&p, &xs)).abs() < 1e-10);
        let g = GaussianHoleParams::gaussian(0.5).unwrap();
        assert!((log_likelihood_half_sq(&g, &half) - log_likelihood(&g, &xs)).abs() < 1e-10);
    }

    #[test]
    fn encoding_round_trips() {
        let theta = encode(0.95, 0.0074, 0.4338);
        let p = decode(&theta);
        assert!((p.k() - 0.95).abs() < 1e-12);
        assert!((p.sigma_i_sq() - 0.0074).abs() < 1e-12);
        assert!((p.sigma_o_sq() - 0.4338).abs() < 1e-12);
    }

    #[test]
    fn nelder_mead_quadratic() {
        let mut evals = 0;
        let opts = FitOptions { f_tolerance: 1e-14, x_tolerance: 1e-9, ..FitOptions::default() };
        let (x, v) = nelder_mead(
            &|x: &[f64; 3]| (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2) + (x[2] - 3.0).powi(2),
            [0.0; 3],
            &opts,
            &mut evals,
        );
        assert!(v < 1e-12, "{v}");
        assert!((x[0] - 1.0).abs() < 1e-5 && (x[1] + 0.5).abs() < 1e-5 && (x[2] - 3.0).abs() < 1e-5);
    }
}
