//! Full length × seed campaign: EIT and calibration tables, synthetic noise
//! spectra, per-section power-law fits and the dB scaling summary, written as
//! a CSV tree with a hashed manifest.
//!
//! Workers compute into memory; all files are written by a single merge step
//! in a fixed order, so output is byte-identical for identical configs
//! regardless of the worker count.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::CampaignConfig;
use crate::error::{Error, Result};
use crate::fit::{self, FitDomain, KappaMode, PowerLawFit, Regime, ScalingResult};
use crate::optics::{self, EitSpectrum};
use crate::receiver::{mw_to_dbm, Power, Receiver, SensitivityPoint};
use crate::synth::{self, NoiseSpectrum};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "SUPERHET_WORKERS";

/// Worker count from [`WORKERS_ENV`], if set to a positive integer.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::validation(
                WORKERS_ENV,
                format!("expected a positive integer, got `{v}`"),
            )),
        },
    }
}

/// Formats an optional float for CSV: empty when absent.
pub fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes a CSV file with a header row, creating parent directories.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes CSV to `out`, or to stdout when `out` is `None`.
pub fn emit_csv(out: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    match out {
        Some(path) => write_csv(path, header, rows),
        None => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            let stdout = PathBuf::from("<stdout>");
            let csv_err = |source| Error::Csv {
                path: stdout.clone(),
                source,
            };
            w.write_record(header).map_err(csv_err)?;
            for row in rows {
                w.write_record(row).map_err(csv_err)?;
            }
            w.flush().map_err(|e| Error::io("<stdout>", e))
        }
    }
}

pub const NPS_HEADER: [&str; 3] = ["f_hz", "p_dbm", "flagged"];

pub fn nps_rows(s: &NoiseSpectrum) -> Vec<Vec<String>> {
    (0..s.len())
        .map(|i| vec![s.freqs[i].to_string(), opt(s.dbm(i)), s.flagged[i].to_string()])
        .collect()
}

pub const EIT_HEADER: [&str; 2] = ["detuning_hz", "transmission"];

pub fn eit_rows(s: &EitSpectrum) -> Vec<Vec<String>> {
    s.detuning_hz
        .iter()
        .zip(&s.transmission)
        .map(|(d, t)| vec![d.to_string(), t.to_string()])
        .collect()
}

pub const FIT_HEADER: [&str; 10] = [
    "f_hz",
    "a_linear",
    "p_n0_linear",
    "kappa",
    "stderr_a",
    "stderr_p_n0",
    "stderr_kappa",
    "p_n0_dbm",
    "p_n0_clamped",
    "kappa_fixed",
];

pub fn fit_row(f_hz: f64, fit: &PowerLawFit) -> Vec<String> {
    vec![
        f_hz.to_string(),
        fit.a_coeff.to_string(),
        fit.p_n0.to_string(),
        fit.kappa.to_string(),
        opt(fit.stderr_a),
        opt(fit.stderr_p_n0),
        opt(fit.stderr_kappa),
        opt((fit.p_n0 > 0.0).then(|| mw_to_dbm(fit.p_n0))),
        fit.p_n0_clamped.to_string(),
        fit.kappa_fixed.to_string(),
    ]
}

pub const SENSITIVITY_HEADER: [&str; 6] = ["l_mm", "n_a_db", "p_s_dbm", "p_na_dbm", "snr_db", "min_rabi_rad_s"];

pub fn sensitivity_row(p: &SensitivityPoint) -> Vec<String> {
    vec![
        p.l_mm.to_string(),
        p.n_a_db.to_string(),
        opt(p.p_s.dbm()),
        opt(p.p_na.dbm()),
        opt(p.snr_db),
        p.min_rabi.to_string(),
    ]
}

pub const SCALING_HEADER: [&str; 5] = ["series", "regime", "slope", "intercept", "r2"];

/// Slopes of one series (signal, noise or snr) in each regime.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesScaling {
    pub series: &'static str,
    pub fits: Vec<ScalingResult>,
}

impl SeriesScaling {
    pub fn slope(&self, regime: Regime) -> Option<f64> {
        self.fits.iter().find(|f| f.regime == regime).map(|f| f.slope)
    }
}

pub fn scaling_rows(series: &[SeriesScaling]) -> Vec<Vec<String>> {
    series
        .iter()
        .flat_map(|s| {
            s.fits.iter().map(move |f| {
                vec![
                    s.series.to_string(),
                    f.regime.as_str().to_string(),
                    f.slope.to_string(),
                    f.intercept.to_string(),
                    f.r_squared.to_string(),
                ]
            })
        })
        .collect()
}

/// N_a threshold (dB) at the quarter-wave interaction length.
pub fn quarter_wave_threshold_db(rx: &Receiver) -> f64 {
    20.0 * (rx.geometry.quarter_wave() * 1e3).log10()
}

/// dB-dB slopes of signal, noise and SNR across a sensitivity table.
pub fn scaling_summary(points: &[SensitivityPoint], threshold_db: f64) -> Result<Vec<SeriesScaling>> {
    let series = |name: &'static str, pick: &dyn Fn(&SensitivityPoint) -> Option<f64>| -> Result<SeriesScaling> {
        let pts: Vec<(f64, f64)> = points
            .iter()
            .map(|p| {
                pick(p)
                    .map(|y| (p.n_a_db, y))
                    .ok_or_else(|| Error::Fit(format!("{name} is absent at l = {} mm", p.l_mm)))
            })
            .collect::<Result<_>>()?;
        Ok(SeriesScaling {
            series: name,
            fits: fit::fit_db_slope_regimes(&pts, threshold_db)
                .map_err(|e| e.with_context(format!("{name} scaling")))?,
        })
    };
    Ok(vec![
        series("signal", &|p| p.p_s.dbm())?,
        series("noise", &|p| p.p_na.dbm())?,
        series("snr", &|p| p.snr_db)?,
    ])
}

/// EIT spectrum and extracted features at one length.
#[derive(Debug, Clone, PartialEq)]
pub struct EitRow {
    pub l_mm: f64,
    pub spectrum: EitSpectrum,
    pub a_eit: f64,
    pub fwhm_hz: f64,
    pub kappa0: f64,
}

pub fn eit_sweep(cfg: &CampaignConfig) -> Result<Vec<EitRow>> {
    let grid = optics::default_detuning_grid();
    cfg.sweep
        .lengths_mm
        .par_iter()
        .map(|&l_mm| {
            let ctx = |e: Error| e.with_context(format!("EIT at l = {l_mm} mm"));
            let spectrum = optics::eit_transmission(&grid, &cfg.eit.with_length(l_mm)).map_err(ctx)?;
            let (a_eit, fwhm_hz) = optics::extract_amplitude_fwhm(&spectrum).map_err(ctx)?;
            let kappa0 = optics::conversion_gain(a_eit, fwhm_hz, cfg.superhet.gain_cal).map_err(ctx)?;
            Ok(EitRow {
                l_mm,
                spectrum,
                a_eit,
                fwhm_hz,
                kappa0,
            })
        })
        .collect()
}

/// Microwave calibration at one length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationRow {
    pub l_mm: f64,
    /// Splitting with the uncorrected local field.
    pub splitting_hz: f64,
    pub correction_db: f64,
    /// Splitting after applying the power correction.
    pub corrected_splitting_hz: f64,
}

pub fn calibration_sweep(cfg: &CampaignConfig) -> Result<Vec<CalibrationRow>> {
    cfg.sweep
        .lengths_mm
        .par_iter()
        .map(|&l_mm| {
            let ctx = |e: Error| e.with_context(format!("A-T calibration at l = {l_mm} mm"));
            let l = l_mm * 1e-3;
            let mean_field = optics::path_average_field(l, &cfg.cell).map_err(ctx)?;
            let correction_db = optics::calibration_correction(l, &cfg.cell).map_err(ctx)?;
            let ladder = cfg.atcal.with_length(l_mm);
            let splitting = |scale: f64| {
                optics::at_splitting(&optics::LadderConfig {
                    omega_mw: ladder.omega_mw.scaled(scale),
                    ..ladder
                })
            };
            Ok(CalibrationRow {
                l_mm,
                splitting_hz: splitting(mean_field).map_err(ctx)?,
                correction_db,
                corrected_splitting_hz: splitting(mean_field * 10f64.powf(correction_db / 20.0)).map_err(ctx)?,
            })
        })
        .collect()
}

/// Budget means of the atomic (P_na) and probe-only (P_np) spectra.
pub fn mean_spectra(rx: &Receiver, l_mm: f64, freqs: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut na = Vec::with_capacity(freqs.len());
    let mut np = Vec::with_capacity(freqs.len());
    for &f in freqs {
        let c = rx.noise(l_mm, f)?;
        na.push(c.total());
        np.push(c.probe_reference());
    }
    Ok((na, np))
}

/// Section-averaged spectra for one (length, seed).
#[derive(Debug, Clone, PartialEq)]
pub struct SectionedSpectra {
    pub na: NoiseSpectrum,
    pub np: NoiseSpectrum,
    pub ni: NoiseSpectrum,
}

/// Synthesizes P_na and P_np at full resolution, subtracts, and sections all
/// three. `l_index` picks the random streams so every length is independent.
pub fn synthesize_length(
    cfg: &CampaignConfig,
    freqs: &[f64],
    means: &(Vec<f64>, Vec<f64>),
    l_index: usize,
    seed: u64,
) -> Result<SectionedSpectra> {
    let s = &cfg.sweep;
    let stream = 2 * l_index as u64;
    let na = synth::synthesize_nps(freqs, &means.0, s.rbw_hz, s.n_avg, seed, stream)?;
    let np = synth::synthesize_nps(freqs, &means.1, s.rbw_hz, s.n_avg, seed, stream + 1)?;
    let ni = synth::subtract_probe_noise(&na, &np)?;
    Ok(SectionedSpectra {
        na: synth::section_average(&na, s.section_width_hz)?,
        np: synth::section_average(&np, s.section_width_hz)?,
        ni: synth::section_average(&ni, s.section_width_hz)?,
    })
}

/// Center of the section containing `f`.
pub fn section_center(cfg: &CampaignConfig, f: f64) -> f64 {
    let w = cfg.sweep.section_width_hz;
    let f0 = cfg.grid.start_hz;
    f0 + (((f - f0) / w).floor() + 0.5) * w
}

/// `(relative atom number, interaction power)` pairs at section frequency `f`
/// across lengths; lengths whose section was dropped are skipped.
fn points_at(lengths_mm: &[f64], spectra: &[&NoiseSpectrum], f: f64) -> Vec<(f64, f64)> {
    lengths_mm
        .iter()
        .zip(spectra)
        .filter_map(|(&l, s)| {
            let i = s.freqs.binary_search_by(|x| x.total_cmp(&f)).ok()?;
            (!s.flagged[i]).then(|| (l, s.power_mw[i]))
        })
        .collect()
}

/// A(f) and P₀(f): one power-law fit per section across the length sweep.
pub fn a_and_pn0_vs_frequency(
    lengths_mm: &[f64],
    spectra: &[&NoiseSpectrum],
    kappa: KappaMode,
    domain: FitDomain,
) -> Result<Vec<(f64, PowerLawFit)>> {
    let Some(first) = spectra.first() else {
        return Err(Error::Fit("no spectra to fit".into()));
    };
    if first.is_empty() {
        return Err(Error::Fit("every section was dropped; nothing to fit".into()));
    }
    first
        .freqs
        .par_iter()
        .map(|&f| {
            let pts = points_at(lengths_mm, spectra, f);
            fit::fit_power_law(&pts, kappa, domain)
                .map(|fit| (f, fit))
                .map_err(|e| e.with_context(format!("power-law fit at f = {f} Hz")))
        })
        .collect()
}

/// Model signal, noise and SNR (no synthesis) at each length.
pub fn model_sensitivity(rx: &Receiver, lengths_mm: &[f64]) -> Result<Vec<SensitivityPoint>> {
    lengths_mm
        .par_iter()
        .map(|&l| {
            rx.snr_and_sensitivity(l)
                .map_err(|e| e.with_context(format!("sensitivity at l = {l} mm")))
        })
        .collect()
}

/// Synthesizes one seed across the sweep and fits every section.
pub fn section_fits(cfg: &CampaignConfig, seed: u64) -> Result<Vec<(f64, PowerLawFit)>> {
    let rx = cfg.receiver();
    let freqs = cfg.grid.frequencies();
    let lengths = &cfg.sweep.lengths_mm;
    let spectra: Vec<SectionedSpectra> = lengths
        .par_iter()
        .enumerate()
        .map(|(i, &l)| {
            let means = mean_spectra(&rx, l, &freqs)?;
            synthesize_length(cfg, &freqs, &means, i, seed)
                .map_err(|e| e.with_context(format!("synthesis at l = {l} mm, seed {seed}")))
        })
        .collect::<Result<_>>()?;
    let ni: Vec<&NoiseSpectrum> = spectra.iter().map(|s| &s.ni).collect();
    a_and_pn0_vs_frequency(lengths, &ni, cfg.sweep.kappa.0, cfg.sweep.fit_domain)
}

/// Free-κ fit of one seed at the read-out section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeKappaRow {
    pub seed: u64,
    pub f_hz: f64,
    pub fit: PowerLawFit,
}

/// What a campaign produced, for callers that want numbers without
/// re-reading the CSV tree.
#[derive(Debug, Clone)]
pub struct CampaignReport {
    pub out_dir: PathBuf,
    pub eit: Vec<EitRow>,
    pub calibration: Vec<CalibrationRow>,
    pub sensitivity: Vec<SensitivityPoint>,
    pub scaling: Vec<SeriesScaling>,
    pub ideal_sensitivity: Vec<SensitivityPoint>,
    pub ideal_scaling: Vec<SeriesScaling>,
    pub free_kappa: Vec<FreeKappaRow>,
    /// Per-seed section fits, ordered by seed then frequency.
    pub fits: Vec<(u64, Vec<(f64, PowerLawFit)>)>,
    pub files: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'a str,
    config_sha256: String,
    seeds: Vec<u64>,
    lengths_mm: &'a [f64],
    files: &'a BTreeMap<String, String>,
}

/// A CSV file to write: path, header, rows.
type PendingCsv<'a> = (PathBuf, Vec<&'a str>, Vec<Vec<String>>);

fn length_tag(l_mm: f64) -> String {
    format!("l{l_mm:.3}mm")
}

/// Runs the campaign into `cfg.sweep.out_dir`, using `workers` threads (or
/// the rayon default).
pub fn run_campaign(cfg: &CampaignConfig, workers: Option<usize>) -> Result<CampaignReport> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::validation(WORKERS_ENV, e.to_string()))?;
    pool.install(|| run_in_pool(cfg))
}

fn run_in_pool(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let out = &cfg.sweep.out_dir;
    let rx = cfg.receiver();
    let lengths = &cfg.sweep.lengths_mm;
    let seeds = cfg.sweep.seed_list();
    let mut written: Vec<PendingCsv> = Vec::new();

    log::info!("EIT spectra for {} lengths", lengths.len());
    let eit = eit_sweep(cfg)?;
    for row in &eit {
        written.push((
            out.join("eit").join(format!("spectrum_{}.csv", length_tag(row.l_mm))),
            EIT_HEADER.to_vec(),
            eit_rows(&row.spectrum),
        ));
    }
    written.push((
        out.join("eit/summary.csv"),
        vec!["l_mm", "a_eit", "fwhm_hz", "kappa0"],
        eit.iter()
            .map(|r| {
                vec![
                    r.l_mm.to_string(),
                    r.a_eit.to_string(),
                    r.fwhm_hz.to_string(),
                    r.kappa0.to_string(),
                ]
            })
            .collect(),
    ));

    log::info!("Autler-Townes calibration");
    let calibration = calibration_sweep(cfg)?;
    written.push((
        out.join("atcal/calibration.csv"),
        vec!["l_mm", "splitting_hz", "correction_db", "corrected_splitting_hz"],
        calibration
            .iter()
            .map(|c| {
                vec![
                    c.l_mm.to_string(),
                    c.splitting_hz.to_string(),
                    c.correction_db.to_string(),
                    c.corrected_splitting_hz.to_string(),
                ]
            })
            .collect(),
    ));

    log::info!("noise spectra: {} lengths x {} seeds", lengths.len(), seeds.len());
    let freqs = cfg.grid.frequencies();
    let means: Vec<(Vec<f64>, Vec<f64>)> = lengths
        .par_iter()
        .map(|&l| mean_spectra(&rx, l, &freqs).map_err(|e| e.with_context(format!("noise budget at l = {l} mm"))))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, u64)> = (0..lengths.len())
        .flat_map(|i| seeds.iter().map(move |&s| (i, s)))
        .collect();
    let spectra: Vec<SectionedSpectra> = jobs
        .par_iter()
        .map(|&(i, seed)| {
            synthesize_length(cfg, &freqs, &means[i], i, seed)
                .map_err(|e| e.with_context(format!("synthesis at l = {} mm, seed {seed}", lengths[i])))
        })
        .collect::<Result<_>>()?;
    let at = |i: usize, k: usize| &spectra[i * seeds.len() + k];
    for (job, s) in jobs.iter().zip(&spectra) {
        let tag = format!("{}_s{}", length_tag(lengths[job.0]), job.1);
        for (kind, spec) in [("na", &s.na), ("np", &s.np), ("ni", &s.ni)] {
            written.push((
                out.join("nps").join(format!("{kind}_{tag}.csv")),
                NPS_HEADER.to_vec(),
                nps_rows(spec),
            ));
        }
    }

    log::info!("scaling at {} Hz", cfg.superhet.f_readout);
    let readout = section_center(cfg, cfg.superhet.f_readout);
    let sensitivity: Vec<SensitivityPoint> = lengths
        .iter()
        .enumerate()
        .map(|(i, &l_mm)| {
            let ctx = |e: Error| e.with_context(format!("sensitivity at l = {l_mm} mm"));
            let mut total = 0.0;
            for k in 0..seeds.len() {
                let na = &at(i, k).na;
                let j = na
                    .freqs
                    .binary_search_by(|x| x.total_cmp(&readout))
                    .map_err(|_| ctx(Error::Alignment(format!("no section at {readout} Hz"))))?;
                total += na.power_mw[j];
            }
            let p_na = Power::from_mw(total / seeds.len() as f64);
            let eq = rx.measurement(l_mm).map_err(ctx)?;
            let p_s = eq.signal_power(cfg.superhet.omega_sig.rad_per_s());
            Ok(SensitivityPoint {
                l_mm,
                n_a_db: synth::relative_atom_number(l_mm)?,
                p_s,
                p_na,
                snr_db: p_s.dbm().zip(p_na.dbm()).map(|(s, n)| s - n),
                min_rabi: eq.rabi_from_power(p_na).map_err(ctx)?,
            })
        })
        .collect::<Result<_>>()?;
    let threshold = quarter_wave_threshold_db(&rx);
    let scaling = scaling_summary(&sensitivity, threshold)?;
    let ideal_sensitivity = model_sensitivity(&rx.ideal(), lengths)?;
    let ideal_scaling = scaling_summary(&ideal_sensitivity, threshold)?;
    written.push((
        out.join("scaling/sensitivity.csv"),
        SENSITIVITY_HEADER.to_vec(),
        sensitivity.iter().map(sensitivity_row).collect(),
    ));
    written.push((
        out.join("scaling/sensitivity_ideal.csv"),
        SENSITIVITY_HEADER.to_vec(),
        ideal_sensitivity.iter().map(sensitivity_row).collect(),
    ));
    written.push((
        out.join("scaling/summary.csv"),
        SCALING_HEADER.to_vec(),
        scaling_rows(&scaling),
    ));
    written.push((
        out.join("scaling/ideal_summary.csv"),
        SCALING_HEADER.to_vec(),
        scaling_rows(&ideal_scaling),
    ));

    log::info!("power-law fits per section");
    let mut fits = Vec::with_capacity(seeds.len());
    let mut free_kappa = Vec::with_capacity(seeds.len());
    for (k, &seed) in seeds.iter().enumerate() {
        let ni: Vec<&NoiseSpectrum> = (0..lengths.len()).map(|i| &at(i, k).ni).collect();
        let per_f = a_and_pn0_vs_frequency(lengths, &ni, cfg.sweep.kappa.0, cfg.sweep.fit_domain)
            .map_err(|e| e.with_context(format!("seed {seed}")))?;
        written.push((
            out.join(format!("fits/fits_s{seed}.csv")),
            FIT_HEADER.to_vec(),
            per_f.iter().map(|(f, fit)| fit_row(*f, fit)).collect(),
        ));
        let pts = points_at(lengths, &ni, readout);
        let fit = fit::fit_power_law(&pts, KappaMode::Free, cfg.sweep.fit_domain)
            .map_err(|e| e.with_context(format!("free-kappa fit at f = {readout} Hz, seed {seed}")))?;
        free_kappa.push(FreeKappaRow {
            seed,
            f_hz: readout,
            fit,
        });
        fits.push((seed, per_f));
    }
    written.push((
        out.join("fits/free_kappa.csv"),
        vec![
            "seed",
            "f_hz",
            "kappa",
            "stderr_kappa",
            "a_linear",
            "p_n0_linear",
            "p_n0_clamped",
        ],
        free_kappa
            .iter()
            .map(|r| {
                vec![
                    r.seed.to_string(),
                    r.f_hz.to_string(),
                    r.fit.kappa.to_string(),
                    opt(r.fit.stderr_kappa),
                    r.fit.a_coeff.to_string(),
                    r.fit.p_n0.to_string(),
                    r.fit.p_n0_clamped.to_string(),
                ]
            })
            .collect(),
    ));

    log::info!("writing {} files under {}", written.len(), out.display());
    let mut files = BTreeMap::new();
    for (path, header, rows) in &written {
        write_csv(path, header, rows)?;
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let rel = path
            .strip_prefix(out)
            .unwrap_or(path)
            .to_string_lossy()
            .replace('\\', "/");
        files.insert(rel, hex::encode(Sha256::digest(&bytes)));
    }
    let config_path = out.join("config.toml");
    let config_text = cfg.dump();
    fs::write(&config_path, &config_text).map_err(|e| Error::io(&config_path, e))?;
    files.insert(
        "config.toml".to_string(),
        hex::encode(Sha256::digest(config_text.as_bytes())),
    );
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: cfg.hash(),
        seeds: seeds.clone(),
        lengths_mm: lengths,
        files: &files,
    };
    let manifest_path = out.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    fs::write(&manifest_path, text).map_err(|e| Error::io(&manifest_path, e))?;

    Ok(CampaignReport {
        out_dir: out.clone(),
        eit,
        calibration,
        sensitivity,
        scaling,
        ideal_sensitivity,
        ideal_scaling,
        free_kappa,
        fits,
        files,
    })
}
