//! Multipath profiles and their reduction to symbol-spaced channels.

mod profile;
mod sync;
mod taps;

pub use profile::{narrowband_factor, pds, sample_profile, ChannelParams, MultipathProfile, PathComponent};
pub use sync::{
    desired_tap_at, search_window, synchronize, SamplingInstants, TimingRule, GRID_DIVISIONS,
    REFINE_TOLERANCE,
};
pub use taps::{effective_taps, DiscreteChannel};
