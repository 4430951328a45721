//! Bimodality of a symmetric sample around the origin.
//!
//! The density is estimated with a Gaussian kernel of bandwidth
//! `0.15·σ̂`, evaluated on a fine grid through linear binning. At that
//! resolution a hole narrower than a few percent of the spread is smoothed
//! away, which is what separates a near-flat-fading channel from a
//! mediumband one.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

/// Fewest samples `dip_statistic` accepts.
pub const MIN_DIP_SAMPLES: usize = 100_000;

/// Kernel bandwidth as a fraction of the sample standard deviation.
pub const DIP_BANDWIDTH_FACTOR: f64 = 0.15;

/// `dip_depth` above which a sample is reported bimodal.
pub const BIMODAL_THRESHOLD: f64 = 0.05;

/// Grid nodes per kernel bandwidth.
const NODES_PER_BANDWIDTH: f64 = 16.0;

/// Kernel truncation, in bandwidths.
const KERNEL_REACH: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipStatistic {
    /// `1 − f̂(0)/max f̂`.
    pub dip_depth: f64,
    pub is_bimodal: bool,
    /// `|x|` at which `f̂` peaks.
    pub peak_location: f64,
    pub bandwidth: f64,
}

pub fn dip_statistic(samples: &[f64]) -> Result<DipStatistic> {
    if samples.len() < MIN_DIP_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: samples.len(),
            need: MIN_DIP_SAMPLES,
        });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sd = libm::sqrt(samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n);
    if !(sd > 0.0) {
        return Err(Error::Params("samples have zero variance"));
    }
    let bandwidth = DIP_BANDWIDTH_FACTOR * sd;
    let delta = bandwidth / NODES_PER_BANDWIDTH;
    let reach = 6.0 * sd + KERNEL_REACH * bandwidth;
    let half_nodes = libm::ceil(reach / delta) as usize;
    let nodes = 2 * half_nodes + 1;

    // Linear binning onto nodes x_j = (j − half_nodes)·Δ.
    let mut counts = vec![0.0f64; nodes];
    for &x in samples {
        let pos = x / delta + half_nodes as f64;
        if pos < 0.0 || pos >= (nodes - 1) as f64 {
            continue;
        }
        let lo = pos as usize;
        let frac = pos - lo as f64;
        counts[lo] += 1.0 - frac;
        counts[lo + 1] += frac;
    }

    let kernel_half = libm::ceil(KERNEL_REACH * NODES_PER_BANDWIDTH) as usize;
    let kernel: Vec<f64> = (0..=kernel_half)
        .map(|i| {
            let u = i as f64 / NODES_PER_BANDWIDTH;
            libm::exp(-0.5 * u * u) / (libm::sqrt(2.0 * PI) * bandwidth * n)
        })
        .collect();
    let density_at = |j: usize| -> f64 {
        let lo = j.saturating_sub(kernel_half);
        let hi = (j + kernel_half).min(nodes - 1);
        (lo..=hi).map(|i| counts[i] * kernel[i.abs_diff(j)]).sum()
    };

    let at_zero = density_at(half_nodes);
    let mut peak = at_zero;
    let mut peak_node = half_nodes;
    // The estimate only needs the core of the distribution for its maximum.
    let search = libm::ceil(4.0 * sd / delta) as usize;
    for j in half_nodes.saturating_sub(search)..=(half_nodes + search).min(nodes - 1) {
        let v = density_at(j);
        if v > peak {
            peak = v;
            peak_node = j;
        }
    }
    let dip_depth = if peak > 0.0 { 1.0 - at_zero / peak } else { 0.0 };
    let peak_location = libm::fabs((peak_node as f64 - half_nodes as f64) * delta);
    Ok(DipStatistic {
        dip_depth,
        is_bimodal: dip_depth > BIMODAL_THRESHOLD && peak_node != half_nodes,
        peak_location,
        bandwidth,
    })
}
