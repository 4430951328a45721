//! CSV tables and the JSON run manifest.
//!
//! Floats are written with `{:e}`, Rust's shortest representation that
//! parses back to the identical value.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use mediumband_core::detection::rayleigh_ber_analytic;
use mediumband_core::FitResult;
use serde::{Deserialize, Serialize};

use crate::{BerCurve, EnsembleStats, RunError, ScatterSamples, SimConfig, SirRow};

fn sci(x: f64) -> String {
    format!("{x:e}")
}

fn create(path: &Path) -> Result<Box<dyn Write>, RunError> {
    let file = File::create(path).map_err(RunError::io(format!("cannot create {}", path.display())))?;
    Ok(Box::new(BufWriter::new(file)))
}

fn write_table(
    path: &Path,
    writer: Box<dyn Write>,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<(), RunError> {
    let context = format!("cannot write {}", path.display());
    let to_io = |e: csv::Error| RunError::Io {
        context: context.clone(),
        source: e.into(),
    };
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(header).map_err(to_io)?;
    for row in rows {
        out.write_record(&row).map_err(to_io)?;
    }
    out.flush().map_err(RunError::io(context.clone()))
}

/// `scheme,pds,gamma_bar_db,bits,errors,ber,stderr`
pub fn write_ber_csv(path: &Path, curves: &[BerCurve]) -> Result<(), RunError> {
    let rows = curves.iter().flat_map(|c| {
        c.points.iter().map(move |p| {
            vec![
                c.scheme.name().to_string(),
                sci(c.pds),
                sci(p.gamma_bar_db),
                p.bits.to_string(),
                p.errors.to_string(),
                sci(p.ber),
                sci(p.stderr),
            ]
        })
    });
    write_table(
        path,
        create(path)?,
        &["scheme", "pds", "gamma_bar_db", "bits", "errors", "ber", "stderr"],
        rows,
    )
}

/// Closed-form Rayleigh BER on the sweep grid: `gamma_bar_db,ber`.
pub fn write_ber_reference_csv(path: &Path, snr_db: &[f64]) -> Result<(), RunError> {
    let rows = snr_db.iter().map(|&s| vec![sci(s), sci(rayleigh_ber_analytic(s))]);
    write_table(path, create(path)?, &["gamma_bar_db", "ber"], rows)
}

/// `pds,sample_index,re_g,im_g`, gzip-compressed when `gzip` is set.
pub fn write_pdf_csv(path: &Path, ensembles: &[EnsembleStats], gzip: bool) -> Result<(), RunError> {
    let writer = create(path)?;
    let writer: Box<dyn Write> = if gzip {
        Box::new(GzEncoder::new(writer, Compression::default()))
    } else {
        writer
    };
    let rows = ensembles.iter().flat_map(|e| {
        e.re_g
            .iter()
            .zip(&e.im_g)
            .enumerate()
            .map(move |(i, (re, im))| vec![sci(e.pds), i.to_string(), sci(*re), sci(*im)])
    });
    write_table(path, writer, &["pds", "sample_index", "re_g", "im_g"], rows)
}

/// `pds,K,sigma_I_sq,sigma_O_sq,loglik`
pub fn write_fit_csv(path: &Path, fits: &[(f64, FitResult)]) -> Result<(), RunError> {
    let rows = fits.iter().map(|(pds, f)| {
        vec![
            sci(*pds),
            sci(f.params.k()),
            sci(f.params.sigma_i_sq()),
            sci(f.params.sigma_o_sq()),
            sci(f.log_likelihood),
        ]
    });
    write_table(path, create(path)?, &["pds", "K", "sigma_I_sq", "sigma_O_sq", "loglik"], rows)
}

/// Per-PDS ensemble summary:
/// `pds,samples,mean_sir_db,mean_tap_energy,mean_path_power,dip_depth,is_bimodal,peak_location`.
/// The dip columns are empty when the ensemble is too small to measure.
pub fn write_ensemble_csv(path: &Path, ensembles: &[EnsembleStats]) -> Result<(), RunError> {
    let rows = ensembles.iter().map(|e| {
        let (depth, bimodal, peak) = match &e.dip {
            Ok(d) => (sci(d.dip_depth), d.is_bimodal.to_string(), sci(d.peak_location)),
            Err(_) => (String::new(), String::new(), String::new()),
        };
        vec![
            sci(e.pds),
            e.re_g.len().to_string(),
            sci(e.mean_sir_db),
            sci(e.mean_tap_energy),
            sci(e.mean_path_power),
            depth,
            bimodal,
            peak,
        ]
    });
    write_table(
        path,
        create(path)?,
        &[
            "pds",
            "samples",
            "mean_sir_db",
            "mean_tap_energy",
            "mean_path_power",
            "dip_depth",
            "is_bimodal",
            "peak_location",
        ],
        rows,
    )
}

/// `pds,mean_sir_db,realizations`
pub fn write_sir_csv(path: &Path, rows: &[SirRow]) -> Result<(), RunError> {
    let rows = rows
        .iter()
        .map(|r| vec![sci(r.pds), sci(r.mean_sir_db), r.realizations.to_string()]);
    write_table(path, create(path)?, &["pds", "mean_sir_db", "realizations"], rows)
}

/// `pds,sample_index,re_h,im_h,re_g,im_g`
pub fn write_scatter_csv(path: &Path, sets: &[ScatterSamples]) -> Result<(), RunError> {
    let rows = sets.iter().flat_map(|s| {
        s.h.iter().zip(&s.g).enumerate().map(move |(i, (h, g))| {
            vec![sci(s.pds), i.to_string(), sci(h.re), sci(h.im), sci(g.re), sci(g.im)]
        })
    });
    write_table(
        path,
        create(path)?,
        &["pds", "sample_index", "re_h", "im_h", "re_g", "im_g"],
        rows,
    )
}

/// Reads a `pdf.csv` (plain or gzip) into `Re g` samples per PDS, in file
/// order of first appearance.
pub fn read_pdf_csv(path: &Path) -> Result<Vec<(f64, Vec<f64>)>, RunError> {
    let invalid = |message: String| RunError::Input {
        path: path.display().to_string(),
        message,
    };
    let mut raw = Vec::new();
    File::open(path)
        .and_then(|f| BufReader::new(f).read_to_end(&mut raw))
        .map_err(RunError::io(format!("cannot read {}", path.display())))?;
    let text: Box<dyn Read> = if raw.starts_with(&[0x1f, 0x8b]) {
        Box::new(GzDecoder::new(raw.as_slice()))
    } else {
        Box::new(raw.as_slice())
    };
    let mut reader = csv::Reader::from_reader(text);
    let headers = reader.headers().map_err(|e| invalid(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| invalid(format!("missing column `{name}`")))
    };
    let (pds_col, re_col) = (column("pds")?, column("re_g")?);

    let mut groups: Vec<(f64, Vec<f64>)> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| invalid(e.to_string()))?;
        let field = |col: usize| -> Result<f64, RunError> {
            record
                .get(col)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| invalid(format!("row {}: unreadable number", line + 2)))
        };
        let (pds, re) = (field(pds_col)?, field(re_col)?);
        match groups.iter_mut().find(|(p, _)| *p == pds) {
            Some((_, samples)) => samples.push(re),
            None => groups.push((pds, vec![re])),
        }
    }
    Ok(groups)
}

/// Record of one CLI run. Feeding it back through `--config` reproduces
/// the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// Resolved configuration as `key → value` strings.
    pub config: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    pub threads: usize,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
    pub wall_time_s: f64,
    pub outputs: Vec<PathBuf>,
    /// Diagnostics such as undersampled BER points or failed fits.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn config_entries(config: &SimConfig) -> BTreeMap<String, String> {
        config
            .entries()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    pub fn write(&self, path: &Path) -> Result<(), RunError> {
        let mut out = create(path)?;
        serde_json::to_writer_pretty(&mut out, self)
            .map_err(|e| RunError::Io {
                context: format!("cannot write {}", path.display()),
                source: e.into(),
            })?;
        writeln!(out)
            .and_then(|_| out.flush())
            .map_err(RunError::io(format!("cannot write {}", path.display())))
    }
}

/// Settings from a config file: either flat `key = value` text or a run
/// manifest, whose `config` section is used.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Config(format!("cannot read config {}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        let manifest: RunManifest = serde_json::from_str(&text)
            .map_err(|e| RunError::Config(format!("invalid manifest {}: {e}", path.display())))?;
        return Ok(manifest.config.into_iter().collect());
    }
    crate::config::parse_entries(&text)
}
