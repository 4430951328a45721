//! Monte Carlo experiments.
//!
//! Every random stream comes from the seed tree `master → experiment → PDS
//! → batch`, and batches are merged in index order, so results are
//! identical for any number of worker threads.

mod ber;
mod ensemble;

pub use ber::{run_ber_sweep, BerCurve, BerPoint};
pub use ensemble::{run_pdf_ensemble, run_scatter, run_sir_sweep, EnsembleStats, ScatterSamples, SirRow};

use mediumband_core::seed::SeedTree;
use mediumband_core::{
    effective_taps, sample_profile, synchronize, ChannelParams, DiscreteChannel, MultipathProfile,
    PulseShape, TimingRule,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{RunError, SimConfig};

/// Realizations per parallel work item in channel ensembles.
const ENSEMBLE_CHUNK: usize = 1000;

/// Draws synchronized channels for one PDS value.
#[derive(Debug, Clone)]
pub(crate) struct ChannelSource {
    params: ChannelParams,
    pulse: PulseShape,
    rule: TimingRule,
}

impl ChannelSource {
    pub(crate) fn new(config: &SimConfig, pds: f64) -> Result<Self, RunError> {
        Ok(ChannelSource {
            params: config.channel_params(pds)?,
            pulse: config.pulse()?,
            rule: config.timing_rule,
        })
    }

    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng) -> (MultipathProfile, DiscreteChannel) {
        let profile = sample_profile(&self.params, rng).expect("parameters validated on construction");
        let instants = synchronize(&profile, &self.pulse, self.rule);
        let channel = effective_taps(&profile, &self.pulse, instants);
        (profile, channel)
    }
}

pub(crate) fn rng_for(node: SeedTree) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(node.seed())
}

/// Seed-tree node for one PDS value of one experiment.
pub(crate) fn pds_node(config: &SimConfig, experiment: &str, pds: f64) -> SeedTree {
    SeedTree::new(config.seed).named(experiment).child(pds.to_bits())
}

/// Per-realization values an ensemble keeps.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Draw {
    pub g: mediumband_core::Complex,
    pub h: mediumband_core::Complex,
    pub interference: f64,
    pub total_energy: f64,
    pub path_power: f64,
}

/// `count` realizations from the substreams under `node`, in index order.
pub(crate) fn draw_ensemble(source: &ChannelSource, node: SeedTree, count: usize) -> Vec<Draw> {
    let chunks = count.div_ceil(ENSEMBLE_CHUNK);
    let per_chunk: Vec<Vec<Draw>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = rng_for(node.child(chunk as u64));
            let len = ENSEMBLE_CHUNK.min(count - chunk * ENSEMBLE_CHUNK);
            (0..len)
                .map(|_| {
                    let (profile, channel) = source.draw(&mut rng);
                    Draw {
                        g: channel.desired(),
                        h: mediumband_core::narrowband_factor(&profile),
                        interference: channel.interference_energy(),
                        total_energy: channel.total_energy(),
                        path_power: profile.total_power(),
                    }
                })
                .collect()
        })
        .collect();
    per_chunk.into_iter().flatten().collect()
}

/// Ratio of average desired power to average interference power, in dB.
pub(crate) fn mean_sir_db(draws: &[Draw]) -> f64 {
    let desired: f64 = draws.iter().map(|d| d.g.norm_sqr()).sum();
    let interference: f64 = draws.iter().map(|d| d.interference).sum();
    if interference == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (desired / interference).log10()
    }
}
