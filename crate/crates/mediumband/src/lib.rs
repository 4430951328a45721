//! Experiment harness for the mediumband channel model: parallel,
//! seed-deterministic ensembles and BER sweeps, their CSV and JSON outputs,
//! and the `mediumband` command-line tool.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod output;

pub use config::{Scheme, SimConfig};
pub use experiments::{
    run_ber_sweep, run_pdf_ensemble, run_scatter, run_sir_sweep, BerCurve, BerPoint,
    EnsembleStats, ScatterSamples, SirRow,
};
pub use mediumband_core as model;

/// Version string recorded in run manifests.
pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+", env!("MEDIUMBAND_GIT_REV"));

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] mediumband_core::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid input {path}: {message}")]
    Input { path: String, message: String },
}

impl RunError {
    pub(crate) fn config(e: mediumband_core::Error) -> Self {
        RunError::Config(e.to_string())
    }

    pub(crate) fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> Self {
        let context = context.into();
        move |source| RunError::Io { context, source }
    }

    /// Process exit status: 2 for configuration errors, 3 for failures
    /// while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 3,
        }
    }
}
