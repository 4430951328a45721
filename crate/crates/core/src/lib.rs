//! Link-level model of mediumband wireless channels.
//!
//! The crate turns random multipath profiles into symbol-spaced discrete
//! channels through a raised-cosine composite pulse and receiver timing
//! synchronization, models the resulting desired fading factor with the
//! Gaussian-hole distribution, and provides the BPSK receivers used to
//! measure bit-error rate over those channels.
//!
//! Everything here is `no_std` (with `alloc`) and takes randomness through
//! an explicit [`rand::Rng`], so the same code runs single-threaded, in
//! parallel workers, or on embedded targets.

#![no_std]

extern crate alloc;

pub mod channel;
pub mod detection;
pub mod error;
pub mod pulse;
pub mod quad;
pub mod seed;
pub mod statmodel;

pub use channel::{
    effective_taps, narrowband_factor, pds, sample_profile, synchronize, ChannelParams,
    DiscreteChannel, MultipathProfile, PathComponent, SamplingInstants, TimingRule,
};
pub use error::{Error, Result};
pub use pulse::PulseShape;
pub use statmodel::{FitResult, GaussianHoleParams};

/// Complex baseband sample type used throughout the crate.
pub type Complex = num_complex::Complex64;
