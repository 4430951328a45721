//! `mediumband` command-line tool.
//!
//! Settings resolve in increasing priority: built-in defaults, `--config`
//! file, `MEDIUMBAND_SEED` (seed only, when the file sets none), flags.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use mediumband_core::statmodel::{self, MIN_FIT_SAMPLES};
use mediumband_core::{Error, FitResult, TimingRule};

use crate::config::snr_grid;
use crate::output::{self, RunManifest};
use crate::{experiments, RunError, SimConfig, VERSION};

#[derive(Debug, Parser)]
#[command(name = "mediumband", version = VERSION, about = "Mediumband wireless link-level simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// BER against SNR for each scheme; writes ber.csv and ber_reference.csv.
    Ber(CommonArgs),
    /// Desired-factor samples and their Gaussian-hole fit; writes pdf.csv,
    /// fit.csv and ensemble.csv.
    Pdf(CommonArgs),
    /// Average SIR per PDS; writes sir.csv.
    Sir(CommonArgs),
    /// Paired narrowband and mediumband factors; writes scatter.csv.
    Scatter(CommonArgs),
    /// Fits the Gaussian-hole model, to `--input` samples if given or to a
    /// fresh ensemble; writes fit.csv.
    Fit(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Percentage delay spread; repeat for several values.
    #[arg(long = "pds", value_name = "PERCENT")]
    pub pds: Vec<f64>,
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    pub snr_min: Option<f64>,
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    pub snr_max: Option<f64>,
    #[arg(long, value_name = "DB")]
    pub snr_step: Option<f64>,
    /// Comma-separated: narrowband-rayleigh-sim, 1-tap, 2-tap-sic, lower-bound.
    #[arg(long, value_delimiter = ',')]
    pub schemes: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// `key = value` file, or a manifest.json from an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Channel realizations per ensemble.
    #[arg(long)]
    pub samples: Option<usize>,
    /// pdf.csv to fit (fit only).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// per-rail, joint-power or max-sir.
    #[arg(long)]
    pub timing_rule: Option<String>,
    #[arg(long)]
    pub target_errors: Option<u64>,
    #[arg(long)]
    pub max_bits: Option<u64>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ber(_) => "ber",
            Command::Pdf(_) => "pdf",
            Command::Sir(_) => "sir",
            Command::Scatter(_) => "scatter",
            Command::Fit(_) => "fit",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Ber(a) | Command::Pdf(a) | Command::Sir(a) | Command::Scatter(a) | Command::Fit(a) => a,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mediumband {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

/// Resolves the configuration for a command.
pub fn resolve_config(args: &CommonArgs, env_seed: Option<&str>) -> Result<SimConfig, RunError> {
    let mut config = SimConfig::default();
    let mut seed_from_file = false;
    if let Some(path) = &args.config {
        for (key, value) in output::read_config_file(path)? {
            seed_from_file |= key == "seed";
            config.set(&key, &value)?;
        }
    }
    if !seed_from_file {
        if let Some(seed) = env_seed {
            config.seed = seed
                .trim()
                .parse()
                .map_err(|_| RunError::Config(format!("MEDIUMBAND_SEED `{seed}` is not an integer")))?;
        }
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if !args.pds.is_empty() {
        config.pds = args.pds.clone();
    }
    if args.snr_min.is_some() || args.snr_max.is_some() || args.snr_step.is_some() {
        let current = &config.snr_db;
        let min = args.snr_min.or(current.first().copied()).unwrap_or(0.0);
        let max = args.snr_max.or(current.last().copied()).unwrap_or(min);
        let step = args
            .snr_step
            .or(current.windows(2).next().map(|w| w[1] - w[0]))
            .unwrap_or(1.0);
        config.snr_db = snr_grid(min, max, step)?;
    }
    if !args.schemes.is_empty() {
        config.schemes = args
            .schemes
            .iter()
            .map(|s| s.trim().parse())
            .collect::<Result<_, _>>()?;
    }
    if let Some(samples) = args.samples {
        config.samples = samples;
    }
    if let Some(rule) = &args.timing_rule {
        config.timing_rule = TimingRule::from_name(rule)
            .ok_or_else(|| RunError::Config(format!("unknown timing rule `{rule}`")))?;
    }
    if let Some(t) = args.target_errors {
        config.target_errors = t;
    }
    if let Some(m) = args.max_bits {
        config.max_bits = m;
    }
    config.validate()?;
    Ok(config)
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

fn execute(command: &Command) -> Result<(), RunError> {
    let args = command.args();
    let env_seed = std::env::var("MEDIUMBAND_SEED").ok();
    let config = resolve_config(args, env_seed.as_deref())?;
    if args.input.is_some() && !matches!(command, Command::Fit(_)) {
        return Err(RunError::Config("--input is only accepted by `fit`".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(|e| RunError::Config(format!("cannot start worker threads: {e}")))?;
    std::fs::create_dir_all(&args.out_dir)
        .map_err(RunError::io(format!("cannot create {}", args.out_dir.display())))?;

    let started_unix_s = unix_now();
    let clock = Instant::now();
    let mut report = Report::default();
    let result = pool.install(|| match command {
        Command::Ber(_) => cmd_ber(&config, &args.out_dir, &mut report),
        Command::Pdf(_) => cmd_pdf(&config, &args.out_dir, &mut report),
        Command::Sir(_) => cmd_sir(&config, &args.out_dir, &mut report),
        Command::Scatter(_) => cmd_scatter(&config, &args.out_dir, &mut report),
        Command::Fit(_) => cmd_fit(&config, args.input.as_deref(), &args.out_dir, &mut report),
    });
    if let Err(e) = &result {
        report.notes.push(format!("failed: {e}"));
    }
    let manifest = RunManifest {
        tool: "mediumband".into(),
        version: VERSION.into(),
        command: command.name().into(),
        seed: config.seed,
        config: RunManifest::config_entries(&config),
        input: args.input.clone(),
        threads: pool.current_num_threads(),
        started_unix_s,
        finished_unix_s: unix_now(),
        wall_time_s: clock.elapsed().as_secs_f64(),
        outputs: report.outputs,
        notes: report.notes,
    };
    manifest.write(&args.out_dir.join("manifest.json"))?;
    result
}

#[derive(Debug, Default)]
struct Report {
    outputs: Vec<PathBuf>,
    notes: Vec<String>,
}

impl Report {
    fn output(&mut self, dir: &Path, name: &str) -> PathBuf {
        self.outputs.push(PathBuf::from(name));
        dir.join(name)
    }
}

fn cmd_ber(config: &SimConfig, out: &Path, report: &mut Report) -> Result<(), RunError> {
    let curves = experiments::run_ber_sweep(config)?;
    for curve in &curves {
        for p in curve.points.iter().filter(|p| p.undersampled) {
            report.notes.push(format!(
                "undersampled: {} pds={:e} gamma_bar_db={:e} errors={} bits={}",
                curve.scheme.name(),
                curve.pds,
                p.gamma_bar_db,
                p.errors,
                p.bits
            ));
        }
    }
    output::write_ber_csv(&report.output(out, "ber.csv"), &curves)?;
    output::write_ber_reference_csv(&report.output(out, "ber_reference.csv"), &config.snr_db)
}

fn fit_notes(pds: f64, fit: &Result<FitResult, Error>, report: &mut Report) -> Option<RunError> {
    match fit {
        Ok(_) => None,
        Err(Error::InsufficientSamples { got, need }) => {
            report
                .notes
                .push(format!("fit skipped at pds={pds:e}: {got} samples, need {need}"));
            None
        }
        Err(e) => Some(RunError::Model(e.clone())),
    }
}

fn cmd_pdf(config: &SimConfig, out: &Path, report: &mut Report) -> Result<(), RunError> {
    let ensembles = config
        .pds
        .iter()
        .map(|&pds| experiments::run_pdf_ensemble(config, pds))
        .collect::<Result<Vec<_>, _>>()?;
    let name = if config.gzip { "pdf.csv.gz" } else { "pdf.csv" };
    output::write_pdf_csv(&report.output(out, name), &ensembles, config.gzip)?;
    output::write_ensemble_csv(&report.output(out, "ensemble.csv"), &ensembles)?;
    let mut failure = None;
    let mut fits = Vec::new();
    for e in &ensembles {
        match &e.fit {
            Ok(f) => fits.push((e.pds, *f)),
            fit => failure = failure.or(fit_notes(e.pds, fit, report)),
        }
    }
    output::write_fit_csv(&report.output(out, "fit.csv"), &fits)?;
    failure.map_or(Ok(()), Err)
}

fn cmd_sir(config: &SimConfig, out: &Path, report: &mut Report) -> Result<(), RunError> {
    let rows = experiments::run_sir_sweep(config)?;
    output::write_sir_csv(&report.output(out, "sir.csv"), &rows)
}

fn cmd_scatter(config: &SimConfig, out: &Path, report: &mut Report) -> Result<(), RunError> {
    let sets = config
        .pds
        .iter()
        .map(|&pds| experiments::run_scatter(config, pds))
        .collect::<Result<Vec<_>, _>>()?;
    output::write_scatter_csv(&report.output(out, "scatter.csv"), &sets)
}

fn cmd_fit(config: &SimConfig, input: Option<&Path>, out: &Path, report: &mut Report) -> Result<(), RunError> {
    let groups = match input {
        Some(path) => {
            let groups = output::read_pdf_csv(path)?;
            if groups.is_empty() {
                return Err(RunError::Model(Error::InsufficientSamples {
                    got: 0,
                    need: MIN_FIT_SAMPLES,
                }));
            }
            groups
        }
        None => config
            .pds
            .iter()
            .map(|&pds| experiments::run_pdf_ensemble(config, pds).map(|e| (pds, e.re_g)))
            .collect::<Result<_, _>>()?,
    };
    let mut fits = Vec::new();
    for (pds, samples) in &groups {
        fits.push((*pds, statmodel::fit(samples)?));
    }
    output::write_fit_csv(&report.output(out, "fit.csv"), &fits)
}
