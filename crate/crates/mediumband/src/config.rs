//! Experiment configuration and its flat `key = value` text format.

use std::fmt::Write as _;
use std::str::FromStr;

use mediumband_core::{ChannelParams, PulseShape, TimingRule};

use crate::RunError;

/// Highest delay spread, in percent of the symbol period, the simulator
/// accepts.
pub const MAX_PDS: f64 = 100.0;

/// Receivers and baselines a BER sweep can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Flat Rayleigh channel `h` from the same multipath profile.
    NarrowbandRayleighSim,
    OneTap,
    TwoTapSic,
    /// ISI-free channel `r = g·s + w`.
    LowerBound,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::NarrowbandRayleighSim,
        Scheme::OneTap,
        Scheme::TwoTapSic,
        Scheme::LowerBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::NarrowbandRayleighSim => "narrowband-rayleigh-sim",
            Scheme::OneTap => "1-tap",
            Scheme::TwoTapSic => "2-tap-sic",
            Scheme::LowerBound => "lower-bound",
        }
    }
}

impl FromStr for Scheme {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| RunError::Config(format!("unknown scheme `{s}`")))
    }
}

/// Full description of an experiment run. The defaults are the reference
/// link-level protocol: ten equal-power Rayleigh paths, unit symbol period,
/// roll-off 0.22, a 12-symbol pulse and 100-bit BPSK frames.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_paths: usize,
    pub symbol_period: f64,
    pub pds: Vec<f64>,
    pub rolloff: f64,
    pub span: u32,
    pub oversampling: u32,
    pub frame_len: usize,
    pub snr_db: Vec<f64>,
    /// A BER point stops once every scheme has this many errors...
    pub target_errors: u64,
    /// ...or once this many bits have been simulated.
    pub max_bits: u64,
    /// Frames per parallel work item.
    pub batch_frames: usize,
    /// Channel realizations per PDF or scatter ensemble.
    pub samples: usize,
    pub sir_realizations: usize,
    /// Channel realizations used to estimate the average received power.
    pub pilot_realizations: usize,
    pub seed: u64,
    pub schemes: Vec<Scheme>,
    pub timing_rule: TimingRule,
    /// Write `pdf.csv` gzip-compressed.
    pub gzip: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_paths: 10,
            symbol_period: 1.0,
            pds: vec![20.0],
            rolloff: 0.22,
            span: 12,
            oversampling: 8,
            frame_len: 100,
            snr_db: snr_grid(0.0, 45.0, 5.0).expect("default grid is valid"),
            target_errors: 200,
            max_bits: 100_000_000,
            batch_frames: 1000,
            samples: 1_000_000,
            sir_realizations: 10_000,
            pilot_realizations: 10_000,
            seed: 1,
            schemes: Scheme::ALL.to_vec(),
            timing_rule: TimingRule::PerRail,
            gzip: false,
        }
    }
}

/// Inclusive SNR grid `min, min + step, ..., max`.
pub fn snr_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, RunError> {
    if !(min.is_finite() && max.is_finite() && step > 0.0 && max >= min) {
        return Err(RunError::Config("SNR grid needs finite min <= max and step > 0".into()));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| min + step * i as f64).collect())
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |msg: &str| Err(RunError::Config(msg.to_string()));
        if self.pds.is_empty() {
            return bad("at least one PDS value is required");
        }
        if let Some(p) = self.pds.iter().find(|p| !(0.0..=MAX_PDS).contains(*p)) {
            return Err(RunError::Config(format!(
                "PDS {p}% is outside [0, {MAX_PDS}]%; larger delay spreads are broadband"
            )));
        }
        for &p in &self.pds {
            self.channel_params(p)?;
        }
        self.pulse()?;
        if self.frame_len == 0 {
            return bad("frame_len must be positive");
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return bad("SNR values must be finite");
        }
        if self.batch_frames == 0 {
            return bad("batch_frames must be positive");
        }
        if self.target_errors == 0 || self.max_bits == 0 {
            return bad("target_errors and max_bits must be positive");
        }
        if self.pilot_realizations == 0 || self.sir_realizations == 0 {
            return bad("pilot_realizations and sir_realizations must be positive");
        }
        if self.schemes.is_empty() {
            return bad("at least one scheme is required");
        }
        Ok(())
    }

    pub fn channel_params(&self, pds: f64) -> Result<ChannelParams, RunError> {
        ChannelParams::from_pds(self.n_paths, pds, self.symbol_period).map_err(RunError::config)
    }

    pub fn pulse(&self) -> Result<PulseShape, RunError> {
        PulseShape::new(self.rolloff, self.span, self.oversampling, self.symbol_period)
            .map_err(RunError::config)
    }

    /// Key-value pairs in file order. Floats use the shortest exact
    /// scientific form, so parsing them back is lossless.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let floats = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",");
        vec![
            ("n_paths", self.n_paths.to_string()),
            ("symbol_period", format!("{:e}", self.symbol_period)),
            ("pds", floats(&self.pds)),
            ("rolloff", format!("{:e}", self.rolloff)),
            ("span", self.span.to_string()),
            ("oversampling", self.oversampling.to_string()),
            ("frame_len", self.frame_len.to_string()),
            ("snr_db", floats(&self.snr_db)),
            ("target_errors", self.target_errors.to_string()),
            ("max_bits", self.max_bits.to_string()),
            ("batch_frames", self.batch_frames.to_string()),
            ("samples", self.samples.to_string()),
            ("sir_realizations", self.sir_realizations.to_string()),
            ("pilot_realizations", self.pilot_realizations.to_string()),
            ("seed", self.seed.to_string()),
            (
                "schemes",
                self.schemes.iter().map(|s| s.name()).collect::<Vec<_>>().join(","),
            ),
            ("timing_rule", self.timing_rule.name().to_string()),
            ("gzip", self.gzip.to_string()),
        ]
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, value) in self.entries() {
            writeln!(out, "{key} = {value}").expect("writing to a String");
        }
        out
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), RunError> {
        let value = value.trim();
        match key.trim() {
            "n_paths" => self.n_paths = parse(key, value)?,
            "symbol_period" => self.symbol_period = parse(key, value)?,
            "pds" => self.pds = parse_list(key, value)?,
            "rolloff" => self.rolloff = parse(key, value)?,
            "span" => self.span = parse(key, value)?,
            "oversampling" => self.oversampling = parse(key, value)?,
            "frame_len" => self.frame_len = parse(key, value)?,
            "snr_db" => self.snr_db = parse_list(key, value)?,
            "target_errors" => self.target_errors = parse(key, value)?,
            "max_bits" => self.max_bits = parse(key, value)?,
            "batch_frames" => self.batch_frames = parse(key, value)?,
            "samples" => self.samples = parse(key, value)?,
            "sir_realizations" => self.sir_realizations = parse(key, value)?,
            "pilot_realizations" => self.pilot_realizations = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "schemes" => self.schemes = parse_list(key, value)?,
            "timing_rule" => {
                self.timing_rule = TimingRule::from_name(value)
                    .ok_or_else(|| RunError::Config(format!("unknown timing rule `{value}`")))?
            }
            "gzip" => self.gzip = parse(key, value)?,
            other => return Err(RunError::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Applies every setting in a `key = value` text.
    pub fn apply_text(&mut self, text: &str) -> Result<(), RunError> {
        for (key, value) in parse_entries(text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }
}

/// Splits `key = value` lines, skipping blank lines and `#` comments.
pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>, RunError> {
    let mut entries = Vec::new();
    for (number, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| RunError::Config(format!("line {}: expected `key = value`", number + 1)))?;
        entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

impl FromStr for SimConfig {
    type Err = RunError;

    /// Defaults overridden by the settings in `text`.
    fn from_str(text: &str) -> Result<Self, RunError> {
        let mut config = SimConfig::default();
        config.apply_text(text)?;
        Ok(config)
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, RunError> {
    value
        .parse()
        .map_err(|_| RunError::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, RunError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| parse(key, v))
        .collect()
}
