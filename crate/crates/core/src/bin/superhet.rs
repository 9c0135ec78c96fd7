use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use superhet::campaign::{self, emit_csv, opt};
use superhet::config::{load_config, CampaignConfig};
use superhet::fit::KappaMode;
use superhet::{optics, specfun, synth, transit, Error, Result};

#[derive(Parser)]
#[command(
    name = "superhet",
    version,
    about = "Rydberg atomic superheterodyne receiver simulator"
)]
struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (table commands) or directory (campaign). Tables go to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for synthesis; for `campaign`, the first of the seed range.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Na,
    Np,
    Ni,
}

#[derive(Subcommand)]
enum Command {
    /// Si, Ci and the auxiliary functions on a log grid.
    Specfun {
        #[arg(long, default_value_t = 1e-3)]
        phi_min: f64,
        #[arg(long, default_value_t = 1e3)]
        phi_max: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
    },
    /// Transit-noise PSD, closed form and quadrature, with both asymptotes.
    Psd {
        #[arg(long, default_value_t = 1e3)]
        f_min: f64,
        #[arg(long, default_value_t = 1e6)]
        f_max: f64,
        #[arg(long, default_value_t = 31)]
        points: usize,
        /// Interaction length in mm (defaults to the config's transit length).
        #[arg(long)]
        l_mm: Option<f64>,
    },
    /// EIT transmission spectrum versus coupling detuning.
    Eit {
        #[arg(long)]
        l_mm: Option<f64>,
        /// Use the Autler-Townes ladder instead of the EIT ladder.
        #[arg(long)]
        dressed: bool,
    },
    /// Autler-Townes splitting and power correction across the length sweep.
    Atcal,
    /// One synthetic noise spectrum.
    Synth {
        #[arg(long)]
        l_mm: f64,
        #[arg(long, value_enum, default_value_t = Kind::Na)]
        kind: Kind,
        /// Keep full resolution instead of averaging into sections.
        #[arg(long)]
        raw: bool,
    },
    /// Per-section power-law fits for one seed.
    Fit {
        /// Fit κ instead of using the configured value.
        #[arg(long)]
        free_kappa: bool,
    },
    /// dB-dB slopes of signal, noise and SNR from the model.
    Scaling {
        /// Atoms-only noise and a homogeneous microwave field.
        #[arg(long)]
        ideal: bool,
    },
    /// Signal, noise, SNR and minimum detectable Rabi frequency per length.
    Sensitivity {
        #[arg(long)]
        ideal: bool,
    },
    /// Full campaign: CSV tree and manifest.
    Campaign,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(Error::Domain(format!(
            "need 0 < min < max and at least 2 points, got [{lo}, {hi}] with {n}"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect())
}

fn run(cli: Cli) -> Result<()> {
    let Format::Csv = cli.format;
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => CampaignConfig::default(),
    };
    let out = cli.out.as_deref();
    let seed = cli.seed.unwrap_or(cfg.sweep.base_seed);

    match cli.command {
        Command::Specfun {
            phi_min,
            phi_max,
            points,
        } => {
            let rows = log_grid(phi_min, phi_max, points)?
                .into_iter()
                .map(|phi| {
                    let (si, ci) = specfun::sici(phi)?;
                    let (f, g) = specfun::auxiliary_fg(phi)?;
                    Ok(vec![
                        phi.to_string(),
                        si.to_string(),
                        ci.to_string(),
                        f.to_string(),
                        g.to_string(),
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            emit_csv(out, &["phi", "si", "ci", "f", "g"], &rows)
        }
        Command::Psd {
            f_min,
            f_max,
            points,
            l_mm,
        } => {
            let p = match l_mm {
                Some(l) => cfg.transit.with_length(l * 1e-3),
                None => cfg.transit,
            };
            let rows = log_grid(f_min, f_max, points)?
                .into_iter()
                .map(|f| {
                    let closed = transit::transit_psd_closed(f, &p)?;
                    let quad = transit::transit_psd_quadrature(f, &p, 1e-8)?;
                    let inb = transit::in_band_amplitude(f, &p)?;
                    let outb = transit::out_of_band_amplitude(f, &p)?;
                    Ok(vec![
                        f.to_string(),
                        inb.phi.to_string(),
                        closed.to_string(),
                        quad.to_string(),
                        opt(inb.in_regime.then_some(inb.value)),
                        opt(outb.in_regime.then_some(outb.value)),
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            emit_csv(
                out,
                &[
                    "f_hz",
                    "phi",
                    "psd_closed",
                    "psd_quadrature",
                    "in_band_amplitude",
                    "out_of_band_amplitude",
                ],
                &rows,
            )
        }
        Command::Eit { l_mm, dressed } => {
            let ladder = if dressed { cfg.atcal } else { cfg.eit };
            let ladder = ladder.with_length(l_mm.unwrap_or(ladder.l_mm));
            let spectrum = optics::eit_transmission(&optics::default_detuning_grid(), &ladder)?;
            if let (Some(a), Some(w)) = (spectrum.a_eit, spectrum.fwhm_hz) {
                log::info!("A_EIT = {a:.6e}, FWHM = {:.4} MHz", w / 1e6);
            }
            emit_csv(out, &campaign::EIT_HEADER, &campaign::eit_rows(&spectrum))
        }
        Command::Atcal => {
            let rows: Vec<Vec<String>> = campaign::calibration_sweep(&cfg)?
                .iter()
                .map(|c| {
                    vec![
                        c.l_mm.to_string(),
                        c.splitting_hz.to_string(),
                        c.correction_db.to_string(),
                        c.corrected_splitting_hz.to_string(),
                    ]
                })
                .collect();
            emit_csv(
                out,
                &["l_mm", "splitting_hz", "correction_db", "corrected_splitting_hz"],
                &rows,
            )
        }
        Command::Synth { l_mm, kind, raw } => {
            if !(l_mm > 0.0) {
                return Err(Error::Domain(format!(
                    "interaction length must be positive, got {l_mm} mm"
                )));
            }
            let rx = cfg.receiver();
            let freqs = cfg.grid.frequencies();
            let (na_mean, np_mean) = campaign::mean_spectra(&rx, l_mm, &freqs)?;
            let s = &cfg.sweep;
            let na = synth::synthesize_nps(&freqs, &na_mean, s.rbw_hz, s.n_avg, seed, 0)?;
            let np = synth::synthesize_nps(&freqs, &np_mean, s.rbw_hz, s.n_avg, seed, 1)?;
            let spectrum = match kind {
                Kind::Na => na,
                Kind::Np => np,
                Kind::Ni => synth::subtract_probe_noise(&na, &np)?,
            };
            let spectrum = if raw {
                spectrum
            } else {
                synth::section_average(&spectrum, s.section_width_hz)?
            };
            emit_csv(out, &campaign::NPS_HEADER, &campaign::nps_rows(&spectrum))
        }
        Command::Fit { free_kappa } => {
            if free_kappa {
                cfg.sweep.kappa.0 = KappaMode::Free;
            }
            let rows: Vec<Vec<String>> = campaign::section_fits(&cfg, seed)?
                .iter()
                .map(|(f, fit)| campaign::fit_row(*f, fit))
                .collect();
            emit_csv(out, &campaign::FIT_HEADER, &rows)
        }
        Command::Scaling { ideal } => {
            let rx = if ideal { cfg.receiver().ideal() } else { cfg.receiver() };
            let points = campaign::model_sensitivity(&rx, &cfg.sweep.lengths_mm)?;
            let summary = campaign::scaling_summary(&points, campaign::quarter_wave_threshold_db(&rx))?;
            emit_csv(out, &campaign::SCALING_HEADER, &campaign::scaling_rows(&summary))
        }
        Command::Sensitivity { ideal } => {
            let rx = if ideal { cfg.receiver().ideal() } else { cfg.receiver() };
            let rows: Vec<Vec<String>> = campaign::model_sensitivity(&rx, &cfg.sweep.lengths_mm)?
                .iter()
                .map(campaign::sensitivity_row)
                .collect();
            emit_csv(out, &campaign::SENSITIVITY_HEADER, &rows)
        }
        Command::Campaign => {
            if let Some(dir) = out {
                cfg.sweep.out_dir = dir.to_path_buf();
            }
            if let Some(s) = cli.seed {
                cfg.sweep.base_seed = s;
            }
            let report = campaign::run_campaign(&cfg, campaign::workers_from_env()?)?;
            log::info!("wrote {} files to {}", report.files.len() + 1, report.out_dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
