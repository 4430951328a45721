use mediumband_core::detection::{
    convolve, detect_1tap, detect_2tap_sic, unit_noise, Frame, SnrPoint,
};
use mediumband_core::seed::SeedTree;
use mediumband_core::{narrowband_factor, Complex};
use rayon::prelude::*;

use super::{draw_ensemble, pds_node, rng_for, ChannelSource};
use crate::{RunError, Scheme, SimConfig};

/// Batches simulated between two checks of the stopping rule. Fixed, so
/// the amount of work per point never depends on the thread count.
const ROUND_BATCHES: usize = 8;

/// Fewest errors a point needs to be reported without the undersampled
/// flag, whatever the stopping target.
const MIN_ERRORS: u64 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub gamma_bar_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    /// Binomial standard error `√(ber(1 − ber)/bits)`.
    pub stderr: f64,
    /// The point stopped at the bit budget before reaching the target
    /// error count, or has fewer than 100 errors.
    pub undersampled: bool,
}

impl BerPoint {
    fn new(gamma_bar_db: f64, bits: u64, errors: u64, target_errors: u64) -> Self {
        let ber = if bits == 0 { 0.0 } else { errors as f64 / bits as f64 };
        BerPoint {
            gamma_bar_db,
            bits,
            errors,
            ber,
            stderr: if bits == 0 { 0.0 } else { (ber * (1.0 - ber) / bits as f64).sqrt() },
            undersampled: errors < target_errors.max(MIN_ERRORS),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub scheme: Scheme,
    pub pds: f64,
    pub points: Vec<BerPoint>,
}

/// BER against average received SNR for every configured scheme and PDS.
///
/// All schemes at a point see the same channels, bits and noise draws.
/// Block fading: each frame gets an independent channel. The noise
/// variance for the mediumband schemes is set from the average tap energy
/// of a pilot ensemble; the narrowband channel has unit average power.
/// A point stops once every scheme has `target_errors` errors or the
/// point has used `max_bits` bits.
pub fn run_ber_sweep(config: &SimConfig) -> Result<Vec<BerCurve>, RunError> {
    config.validate()?;
    let mut curves = Vec::new();
    for &pds in &config.pds {
        curves.extend(sweep_pds(config, pds)?);
    }
    Ok(curves)
}

fn sweep_pds(config: &SimConfig, pds: f64) -> Result<Vec<BerCurve>, RunError> {
    let source = ChannelSource::new(config, pds)?;
    let needs_pilot = config.schemes.iter().any(|s| *s != Scheme::NarrowbandRayleighSim);
    let signal_power = if needs_pilot {
        let pilot = draw_ensemble(&source, pds_node(config, "pilot", pds), config.pilot_realizations);
        pilot.iter().map(|d| d.total_energy).sum::<f64>() / pilot.len() as f64
    } else {
        1.0
    };

    let node = pds_node(config, "ber", pds);
    let n_points = config.snr_db.len();
    let n_schemes = config.schemes.len();
    let bits_per_batch = (config.batch_frames * config.frame_len) as u64;
    let max_batches = config.max_bits.div_ceil(bits_per_batch) as usize;
    let mut errors = vec![vec![0u64; n_schemes]; n_points];
    let mut bits = vec![0u64; n_points];
    let done = |errors: &[u64], bits: u64| {
        bits >= config.max_bits || errors.iter().all(|&e| e >= config.target_errors)
    };

    let mut next_batch = 0;
    loop {
        let active: Vec<usize> = (0..n_points).filter(|&i| !done(&errors[i], bits[i])).collect();
        if active.is_empty() || next_batch >= max_batches {
            break;
        }
        let batches = next_batch..(next_batch + ROUND_BATCHES).min(max_batches);
        let counts: Vec<Vec<Vec<u64>>> = batches
            .clone()
            .into_par_iter()
            .map(|b| simulate_batch(config, &source, node.child(b as u64), &active, signal_power))
            .collect::<Result<_, _>>()?;
        for batch in counts {
            for (slot, &point) in active.iter().enumerate() {
                bits[point] += bits_per_batch;
                for (total, e) in errors[point].iter_mut().zip(&batch[slot]) {
                    *total += e;
                }
            }
        }
        next_batch = batches.end;
    }

    Ok(config
        .schemes
        .iter()
        .enumerate()
        .map(|(s, &scheme)| BerCurve {
            scheme,
            pds,
            points: (0..n_points)
                .map(|i| BerPoint::new(config.snr_db[i], bits[i], errors[i][s], config.target_errors))
                .collect(),
        })
        .collect())
}

/// Error counts `[point][scheme]` of one batch of frames.
fn simulate_batch(
    config: &SimConfig,
    source: &ChannelSource,
    node: SeedTree,
    points: &[usize],
    signal_power: f64,
) -> Result<Vec<Vec<u64>>, RunError> {
    let mut rng = rng_for(node);
    let noise_node = node.named("noise");
    let mut noise_rngs: Vec<_> = points
        .iter()
        .map(|&i| rng_for(noise_node.child(config.snr_db[i].to_bits())))
        .collect();
    let noise_sd: Vec<(f64, f64)> = points
        .iter()
        .map(|&i| {
            let snr = SnrPoint::new(config.snr_db[i]);
            (snr.noise(signal_power).variance().sqrt(), snr.noise(1.0).variance().sqrt())
        })
        .collect();
    let mut counts = vec![vec![0u64; config.schemes.len()]; points.len()];

    for _ in 0..config.batch_frames {
        let (profile, channel) = source.draw(&mut rng);
        let frame = Frame::random(config.frame_len, &mut rng);
        let symbols = frame.symbols();
        let through_channel = convolve(&symbols, &channel);
        let g = channel.desired();
        let h = narrowband_factor(&profile);
        let interferer = channel.strongest_interferer();

        for (slot, noise_rng) in noise_rngs.iter_mut().enumerate() {
            let noise = unit_noise(config.frame_len, noise_rng);
            let (sd, sd_narrowband) = noise_sd[slot];
            let flat = |gain: Complex, sd: f64| -> Vec<Complex> {
                symbols.iter().zip(&noise).map(|(&s, &w)| gain * s + w * sd).collect()
            };
            for (s, scheme) in config.schemes.iter().enumerate() {
                let detected = match scheme {
                    Scheme::NarrowbandRayleighSim => detect_1tap(&flat(h, sd_narrowband), h)?,
                    Scheme::LowerBound => detect_1tap(&flat(g, sd), g)?,
                    Scheme::OneTap | Scheme::TwoTapSic => {
                        let received: Vec<Complex> =
                            through_channel.iter().zip(&noise).map(|(&y, &w)| y + w * sd).collect();
                        match (scheme, interferer) {
                            (Scheme::TwoTapSic, Some((j, cj))) => {
                                detect_2tap_sic(&received, g, cj, j)?.bits
                            }
                            _ => detect_1tap(&received, g)?,
                        }
                    }
                };
                counts[slot][s] += frame.bit_errors(&detected) as u64;
            }
        }
    }
    Ok(counts)
}
