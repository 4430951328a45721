use crate::statmodel::FitResult;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(&'static str),

    #[error("invalid Gaussian-hole parameters: {0}")]
    Params(&'static str),

    #[error("degenerate channel: desired tap is zero")]
    DegenerateChannel,

    #[error("insufficient samples: got {got}, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },

    #[error("fit did not converge after {} likelihood evaluations", best.evaluations)]
    FitFailed { best: FitResult },
}
