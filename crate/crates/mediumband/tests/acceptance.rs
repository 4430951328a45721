//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use mediumband::model::detection::rayleigh_ber_analytic;
use mediumband::model::quad::integrate;
use mediumband::model::statmodel::{fit, GaussianHoleParams};
use mediumband::output::{
    write_ber_csv, write_ensemble_csv, write_fit_csv, write_pdf_csv, write_scatter_csv, write_sir_csv,
};
use mediumband::{
    run_ber_sweep, run_pdf_ensemble, run_scatter, run_sir_sweep, BerCurve, EnsembleStats, Scheme, SimConfig,
};
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fitted rows `(PDS, K, σ_I², σ_O²)` of the reference link-level study.
const TABLE: [(f64, f64, f64, f64); 4] = [
    (20.0, 0.9218, 0.0008, 0.4818),
    (40.0, 0.9336, 0.0031, 0.4580),
    (60.0, 0.9502, 0.0074, 0.4338),
    (80.0, 0.9668, 0.0131, 0.4054),
];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, detail }
    }
}

fn report(name: &str, started: Instant, outcome: Outcome, failures: &mut Vec<String>) {
    let verdict = if outcome.pass { "PASS" } else { "FAIL" };
    println!(
        "{verdict} {name:<26} [{:>6.1}s] {}",
        started.elapsed().as_secs_f64(),
        outcome.detail
    );
    if !outcome.pass {
        failures.push(name.to_string());
    }
}

fn config(edit: impl FnOnce(&mut SimConfig)) -> SimConfig {
    let mut c = SimConfig::default();
    edit(&mut c);
    c
}

fn curve(curves: &[BerCurve], scheme: Scheme, pds: f64) -> &BerCurve {
    curves
        .iter()
        .find(|c| c.scheme == scheme && c.pds == pds)
        .expect("scheme was simulated")
}

fn ber_at(c: &BerCurve, snr: f64) -> (f64, f64) {
    let p = c.points.iter().find(|p| p.gamma_bar_db == snr).expect("point on grid");
    (p.ber, p.stderr)
}

fn table_reproduction(ensembles: &[EnsembleStats]) -> Outcome {
    let mut pass = true;
    let mut detail = String::new();
    for &(pds, k, si, so) in &TABLE {
        let e = ensembles.iter().find(|e| e.pds == pds).unwrap();
        match &e.fit {
            Ok(f) => {
                let p = f.params;
                let ok = (p.k() - k).abs() <= 0.03
                    && (p.sigma_o_sq() - so).abs() <= 0.03
                    && (p.sigma_i_sq() / si - 1.0).abs() <= 0.5;
                pass &= ok;
                write!(
                    detail,
                    "{pds}%: K={:.4} sI2={:.5} sO2={:.4}; ",
                    p.k(),
                    p.sigma_i_sq(),
                    p.sigma_o_sq()
                )
                .unwrap();
            }
            Err(err) => {
                pass = false;
                write!(detail, "{pds}%: fit failed ({err}); ").unwrap();
            }
        }
    }
    Outcome::new(pass, detail)
}

fn bimodality(ensembles: &[EnsembleStats]) -> Outcome {
    let mut detail = String::new();
    let mut depths = Vec::new();
    let mut pass = true;
    for e in ensembles {
        match &e.dip {
            Ok(d) => {
                pass &= d.is_bimodal == (e.pds >= 20.0);
                if e.pds >= 20.0 {
                    depths.push(d.dip_depth);
                }
                write!(detail, "{}%: depth={:.4} bimodal={}; ", e.pds, d.dip_depth, d.is_bimodal).unwrap();
            }
            Err(err) => {
                pass = false;
                write!(detail, "{}%: {err}; ", e.pds).unwrap();
            }
        }
    }
    pass &= depths.windows(2).all(|w| w[1] > w[0]);
    Outcome::new(pass, detail)
}

fn narrowband_oracle() -> Outcome {
    let c = config(|c| {
        c.schemes = vec![Scheme::NarrowbandRayleighSim];
        c.snr_db = vec![0.0, 10.0, 20.0];
        c.target_errors = u64::MAX;
        c.max_bits = 20_000_000;
    });
    let curves = run_ber_sweep(&c).unwrap();
    let mut pass = true;
    let mut detail = String::new();
    for p in &curves[0].points {
        let exact = rayleigh_ber_analytic(p.gamma_bar_db);
        let rel = p.ber / exact - 1.0;
        pass &= rel.abs() < 0.05 && p.bits >= 1_000_000;
        write!(detail, "{}dB: {:.4e} vs {:.4e} ({:+.2}%); ", p.gamma_bar_db, p.ber, exact, 100.0 * rel).unwrap();
    }
    Outcome::new(pass, detail)
}

/// All four schemes on `0, 5, ..., 50` dB at `pds`.
fn full_sweep(pds: f64) -> Vec<BerCurve> {
    let c = config(|c| {
        c.pds = vec![pds];
        c.snr_db = (0..=10).map(|i| 5.0 * f64::from(i)).collect();
        c.target_errors = 1000;
        c.max_bits = 30_000_000;
    });
    run_ber_sweep(&c).unwrap()
}

fn deep_fading_avoidance(curves: &[BerCurve]) -> Outcome {
    let one = curve(curves, Scheme::OneTap, 20.0);
    let mut pass = true;
    let mut detail = String::from("1-tap/Rayleigh: ");
    for snr in [5.0, 10.0, 15.0, 20.0, 25.0, 30.0] {
        let ratio = ber_at(one, snr).0 / rayleigh_ber_analytic(snr);
        pass &= ratio < 1.0;
        write!(detail, "{snr}dB {ratio:.3}, ").unwrap();
    }
    detail.push_str("| change per 5dB: ");
    for (a, b) in [(40.0, 45.0), (45.0, 50.0)] {
        let factor = ber_at(one, a).0 / ber_at(one, b).0;
        pass &= factor < 1.5;
        write!(detail, "{a}->{b}dB {factor:.3}, ").unwrap();
    }
    Outcome::new(pass, detail)
}

/// SNR at which `(snr, ber)` points cross `target`, interpolating
/// linearly in `log ber`.
fn crossing(points: &[(f64, f64)], target: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let ((s0, b0), (s1, b1)) = (w[0], w[1]);
        (b0 >= target && b1 < target && b1 > 0.0)
            .then(|| s0 + (s1 - s0) * (b0 / target).ln() / (b0 / b1).ln())
    })
}

fn lower_bound_advantage() -> Outcome {
    let mut pass = true;
    let mut detail = String::new();
    let reference = crossing(
        &(0..=600).map(|i| (f64::from(i) / 10.0, rayleigh_ber_analytic(f64::from(i) / 10.0))).collect::<Vec<_>>(),
        1e-4,
    )
    .unwrap();
    for (pds, gain, lo) in [(20.0, 8.0, 22), (60.0, 13.0, 17)] {
        let c = config(|c| {
            c.pds = vec![pds];
            c.schemes = vec![Scheme::LowerBound];
            c.snr_db = (lo..lo + 10).map(f64::from).collect();
            c.target_errors = 2000;
            c.max_bits = 40_000_000;
        });
        let curves = run_ber_sweep(&c).unwrap();
        let points: Vec<(f64, f64)> = curves[0].points.iter().map(|p| (p.gamma_bar_db, p.ber)).collect();
        match crossing(&points, 1e-4) {
            Some(at) => {
                let measured = reference - at;
                pass &= (measured - gain).abs() <= 2.0;
                write!(detail, "{pds}%: {at:.2}dB, gain {measured:.2}dB (target {gain}±2); ").unwrap();
            }
            None => {
                pass = false;
                write!(detail, "{pds}%: no crossing in {lo}..{}dB; ", lo + 9).unwrap();
            }
        }
    }
    write!(detail, "narrowband {reference:.2}dB").unwrap();
    Outcome::new(pass, detail)
}

/// `a ≤ b` within two standard errors of the difference.
fn below(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.0 + 2.0 * (a.1 * a.1 + b.1 * b.1).sqrt()
}

fn ordering(sweeps: &[(f64, Vec<BerCurve>)]) -> (bool, String) {
    let mut pass = true;
    let mut detail = String::new();
    for (pds, curves) in sweeps {
        let (one, sic, lb) = (
            curve(curves, Scheme::OneTap, *pds),
            curve(curves, Scheme::TwoTapSic, *pds),
            curve(curves, Scheme::LowerBound, *pds),
        );
        let violations = one
            .points
            .iter()
            .filter(|p| {
                let s = p.gamma_bar_db;
                !(below(ber_at(lb, s), ber_at(sic, s)) && below(ber_at(sic, s), ber_at(one, s)))
            })
            .count();
        pass &= violations == 0;
        write!(detail, "{pds}%: {violations} ordering violations; ").unwrap();
    }
    (pass, detail)
}

/// Both detectors at 45 and 50 dB, PDS 60%, run until each has 200
/// errors. The points share channels, bits and noise, so their ratio is
/// resolved even where the floor sits near 1e-7.
fn floors() -> (bool, String) {
    let c = config(|c| {
        c.pds = vec![60.0];
        c.schemes = vec![Scheme::OneTap, Scheme::TwoTapSic];
        c.snr_db = vec![45.0, 50.0];
        c.target_errors = 200;
        c.max_bits = 1_000_000_000;
    });
    let curves = run_ber_sweep(&c).unwrap();
    let mut pass = true;
    let mut detail = String::new();
    for c in &curves {
        let (at_45, at_50) = (&c.points[0], &c.points[1]);
        let factor = at_45.ber / at_50.ber;
        pass &= factor < 1.5 && !at_50.undersampled;
        write!(
            detail,
            "60% {} floor {:.2e} ({} errors), 45->50dB factor {factor:.3}; ",
            c.scheme.name(),
            at_50.ber,
            at_50.errors
        )
        .unwrap();
    }
    (pass, detail)
}

fn ordering_and_floors(sweeps: &[(f64, Vec<BerCurve>)]) -> Outcome {
    let (ordered, mut detail) = ordering(sweeps);
    let (floored, floor_detail) = floors();
    detail.push_str(&floor_detail);
    Outcome::new(ordered && floored, detail)
}

fn sir_trend() -> Outcome {
    let c = config(|c| {
        c.pds = vec![5.0, 10.0, 20.0, 40.0, 60.0, 80.0];
        c.sir_realizations = 10_000;
    });
    let rows = run_sir_sweep(&c).unwrap();
    let pass = rows.windows(2).all(|w| w[1].mean_sir_db < w[0].mean_sir_db)
        && rows.iter().all(|r| r.realizations >= 10_000);
    let detail = rows
        .iter()
        .map(|r| format!("{}%: {:.2}dB", r.pds, r.mean_sir_db))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome::new(pass, detail)
}

fn gaussian_density(x: f64, variance: f64) -> f64 {
    (-x * x / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
}

fn ks_statistic(p: &GaussianHoleParams, mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let (mut cdf, mut prev, mut d) = (0.0, -12.0 * p.lambda0(), 0.0f64);
    for (i, &x) in xs.iter().enumerate() {
        cdf += integrate(&|t| p.pdf(t), prev, x, 1e-13);
        prev = x;
        d = d.max((cdf - i as f64 / n).abs()).max(((i + 1) as f64 / n - cdf).abs());
    }
    d
}

fn statmodel_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rows: Vec<GaussianHoleParams> = TABLE
        .iter()
        .map(|&(_, k, si, so)| GaussianHoleParams::new(k, si, so).unwrap())
        .collect();
    let mut checks = BTreeMap::new();

    let mut draws = rows.clone();
    draws.extend((0..100).map(|_| {
        let so = rng.random_range(0.05..2.0);
        GaussianHoleParams::new(rng.random_range(0.0..=1.0), so * rng.random_range(1e-4..0.95), so).unwrap()
    }));
    let worst_mass = draws
        .iter()
        .map(|p| (integrate(&|x| p.pdf(x), -9.0 * p.lambda0(), 9.0 * p.lambda0(), 1e-11) - 1.0).abs())
        .fold(0.0, f64::max);
    checks.insert("normalization", (worst_mass < 1e-6, format!("{worst_mass:.1e}")));

    let worst_sup = [0.1, 0.5, 2.0]
        .iter()
        .map(|&so| {
            let p = GaussianHoleParams::new(0.0, 0.3 * so, so).unwrap();
            (0..=10_000)
                .map(|i| -6.0 + 12.0 * f64::from(i) / 10_000.0)
                .map(|x| (p.pdf(x) - gaussian_density(x, so)).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    checks.insert("gaussian-limit", (worst_sup < 1e-12, format!("{worst_sup:.1e}")));

    let n = 100_000;
    let critical = 1.628 / (n as f64).sqrt();
    let worst_ks = rows
        .iter()
        .map(|p| ks_statistic(p, (0..n).map(|_| p.sample(&mut rng)).collect()))
        .fold(0.0, f64::max);
    checks.insert("ks", (worst_ks < critical, format!("{worst_ks:.4}<{critical:.4}")));

    let p = rows[2];
    let (mut accepted, mut proposals) = (0u64, 0u64);
    while proposals < 1_000_000 {
        proposals += u64::from(p.sample_counted(&mut rng).1);
        accepted += 1;
    }
    let rate_err = (accepted as f64 / proposals as f64 - p.acceptance_rate()).abs();
    checks.insert("acceptance-rate", (rate_err < 0.002, format!("{rate_err:.1e}")));

    let mut round_trip = String::new();
    let mut round_trip_ok = true;
    for (&(pds, ..), p) in TABLE.iter().zip(&rows) {
        let xs: Vec<f64> = (0..1_000_000).map(|_| p.sample(&mut rng)).collect();
        match fit(&xs) {
            Ok(f) => {
                let q = f.params;
                round_trip_ok &= (q.k() - p.k()).abs() <= 0.02
                    && (q.sigma_o_sq() - p.sigma_o_sq()).abs() <= 0.01
                    && (q.sigma_i_sq() / p.sigma_i_sq() - 1.0).abs() <= 0.3;
                write!(round_trip, "{pds}%:{:.4}/{:.5}/{:.4} ", q.k(), q.sigma_i_sq(), q.sigma_o_sq()).unwrap();
            }
            Err(e) => {
                round_trip_ok = false;
                write!(round_trip, "{pds}%:{e} ").unwrap();
            }
        }
    }
    checks.insert("fit-round-trip", (round_trip_ok, round_trip.trim_end().to_string()));

    let pass = checks.values().all(|(ok, _)| *ok);
    let detail = checks
        .iter()
        .map(|(name, (ok, d))| format!("{name} {} ({d})", if *ok { "ok" } else { "FAILED" }))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome::new(pass, detail)
}

/// Every table written by one configuration, run inside a pool of
/// `threads` workers.
fn outputs(threads: usize, dir: &Path) -> Vec<(String, Vec<u8>)> {
    let c = config(|c| {
        c.pds = vec![20.0, 60.0];
        c.snr_db = vec![10.0, 30.0];
        c.target_errors = 100;
        c.max_bits = 1_000_000;
        c.pilot_realizations = 2000;
        c.samples = 20_000;
        c.sir_realizations = 3000;
    });
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let curves = run_ber_sweep(&c).unwrap();
        write_ber_csv(&dir.join("ber.csv"), &curves).unwrap();
        let ensembles: Vec<_> = c.pds.iter().map(|&p| run_pdf_ensemble(&c, p).unwrap()).collect();
        write_pdf_csv(&dir.join("pdf.csv"), &ensembles, false).unwrap();
        write_ensemble_csv(&dir.join("ensemble.csv"), &ensembles).unwrap();
        let fits: Vec<_> = ensembles.iter().map(|e| (e.pds, *e.fit.as_ref().unwrap())).collect();
        write_fit_csv(&dir.join("fit.csv"), &fits).unwrap();
        write_sir_csv(&dir.join("sir.csv"), &run_sir_sweep(&c).unwrap()).unwrap();
        let scatter: Vec<_> = c.pds.iter().map(|&p| run_scatter(&c, p).unwrap()).collect();
        write_scatter_csv(&dir.join("scatter.csv"), &scatter).unwrap();
    });
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let runs: Vec<_> = [1, 4, 4].iter().zip(&dirs).map(|(&t, d)| outputs(t, d.path())).collect();
    let identical = runs.windows(2).all(|w| w[0] == w[1]);
    let names: Vec<_> = runs[0].iter().map(|(n, _)| n.as_str()).collect();
    Outcome::new(
        identical && names.len() == 6,
        format!("1, 4 and 4 workers: {} identical", names.join(", ")),
    )
}

fn main() {
    let mut failures = Vec::new();

    let started = Instant::now();
    let c = config(|c| c.samples = 1_000_000);
    let ensembles: Vec<EnsembleStats> = [2.5, 20.0, 40.0, 60.0, 80.0]
        .iter()
        .map(|&pds| run_pdf_ensemble(&c, pds).unwrap())
        .collect();
    report("table-reproduction", started, table_reproduction(&ensembles), &mut failures);
    report("bimodality-emergence", started, bimodality(&ensembles), &mut failures);
    drop(ensembles);

    let started = Instant::now();
    report("narrowband-oracle", started, narrowband_oracle(), &mut failures);

    let started = Instant::now();
    let sweeps = vec![(20.0, full_sweep(20.0)), (60.0, full_sweep(60.0))];
    report("deep-fading-avoidance", started, deep_fading_avoidance(&sweeps[0].1), &mut failures);
    report("ordering-and-floors", started, ordering_and_floors(&sweeps), &mut failures);

    let started = Instant::now();
    report("lower-bound-advantage", started, lower_bound_advantage(), &mut failures);

    let started = Instant::now();
    report("sir-trend", started, sir_trend(), &mut failures);

    let started = Instant::now();
    report("statmodel-suite", started, statmodel_suite(), &mut failures);

    let started = Instant::now();
    report("determinism", started, determinism(), &mut failures);

    if failures.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: {} failed: {}", failures.len(), failures.join(", "));
        std::process::exit(1);
    }
}
