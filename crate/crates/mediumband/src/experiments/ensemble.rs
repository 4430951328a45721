use mediumband_core::statmodel::{self, DipStatistic};
use mediumband_core::{Complex, Error, FitResult};

use super::{draw_ensemble, mean_sir_db, pds_node, ChannelSource, Draw};
use crate::{RunError, SimConfig};

/// Desired-factor ensemble at one PDS and what is derived from it.
#[derive(Debug, Clone)]
pub struct EnsembleStats {
    pub pds: f64,
    pub re_g: Vec<f64>,
    pub im_g: Vec<f64>,
    /// Gaussian-hole fit to the real parts.
    pub fit: Result<FitResult, Error>,
    pub dip: Result<DipStatistic, Error>,
    pub mean_sir_db: f64,
    /// Ensemble mean of `Σ_k |c_k|²`.
    pub mean_tap_energy: f64,
    /// Ensemble mean of `Σ_n α_n²`.
    pub mean_path_power: f64,
}

/// Draws `config.samples` synchronized channels at `pds`, fits the
/// Gaussian-hole model to `Re g` and measures its dip.
///
/// Shares its substreams with [`run_scatter`], so both see the same
/// channels.
pub fn run_pdf_ensemble(config: &SimConfig, pds: f64) -> Result<EnsembleStats, RunError> {
    config.validate()?;
    let draws = ensemble_draws(config, pds)?;
    let n = draws.len() as f64;
    let re_g: Vec<f64> = draws.iter().map(|d| d.g.re).collect();
    let im_g: Vec<f64> = draws.iter().map(|d| d.g.im).collect();
    Ok(EnsembleStats {
        pds,
        fit: statmodel::fit(&re_g),
        dip: statmodel::dip_statistic(&re_g),
        mean_sir_db: mean_sir_db(&draws),
        mean_tap_energy: draws.iter().map(|d| d.total_energy).sum::<f64>() / n,
        mean_path_power: draws.iter().map(|d| d.path_power).sum::<f64>() / n,
        re_g,
        im_g,
    })
}

fn ensemble_draws(config: &SimConfig, pds: f64) -> Result<Vec<Draw>, RunError> {
    let source = ChannelSource::new(config, pds)?;
    Ok(draw_ensemble(&source, pds_node(config, "ensemble", pds), config.samples))
}

/// Narrowband factor `h` and desired factor `g` of the same profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSamples {
    pub pds: f64,
    pub h: Vec<Complex>,
    pub g: Vec<Complex>,
}

pub fn run_scatter(config: &SimConfig, pds: f64) -> Result<ScatterSamples, RunError> {
    config.validate()?;
    let draws = ensemble_draws(config, pds)?;
    Ok(ScatterSamples {
        pds,
        h: draws.iter().map(|d| d.h).collect(),
        g: draws.iter().map(|d| d.g).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirRow {
    pub pds: f64,
    pub mean_sir_db: f64,
    pub realizations: usize,
}

/// Average SIR (average desired power over average interference power)
/// for every PDS in the configuration.
pub fn run_sir_sweep(config: &SimConfig) -> Result<Vec<SirRow>, RunError> {
    config.validate()?;
    config
        .pds
        .iter()
        .map(|&pds| {
            let source = ChannelSource::new(config, pds)?;
            let draws = draw_ensemble(&source, pds_node(config, "sir", pds), config.sir_realizations);
            Ok(SirRow {
                pds,
                mean_sir_db: mean_sir_db(&draws),
                realizations: draws.len(),
            })
        })
        .collect()
}
