//! Statistical behavior of the synthesis and reduction pipeline.

use superhet::campaign::{a_and_pn0_vs_frequency, mean_spectra, synthesize_length};
use superhet::config::CampaignConfig;
use superhet::fit::{FitDomain, KappaMode};
use superhet::receiver::{mw_to_dbm, FloorTable, NoiseBudget, Receiver};
use superhet::synth::{section_average, synthesize_nps, NoiseSpectrum};
use superhet::transit;

const LENGTHS: [f64; 9] = [7.28, 8.405, 9.53, 10.655, 11.78, 12.905, 14.03, 15.155, 16.28];

fn relative_spread(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    var.sqrt() / mean
}

#[test]
fn per_bin_scatter_follows_the_averaging_count() {
    let freqs = [5e4];
    let draws: Vec<f64> = (0..1000)
        .map(|seed| synthesize_nps(&freqs, &[1e-12], 1.0, 100, seed, 0).unwrap().power_mw[0])
        .collect();
    let spread = relative_spread(&draws);
    assert!((spread - 0.10).abs() <= 0.01, "relative std {spread}");
}

#[test]
fn sectioning_reduces_the_scatter() {
    let freqs: Vec<f64> = (0..10_000).map(|k| 1e4 + k as f64).collect();
    let s = synthesize_nps(&freqs, &vec![1e-12; freqs.len()], 1.0, 100, 7, 0).unwrap();
    let sections = section_average(&s, 100.0).unwrap();
    let raw = relative_spread(&s.power_mw);
    let averaged = relative_spread(&sections.power_mw);
    // 100 bins per section: a tenfold reduction
    assert!(
        (raw / averaged / 10.0 - 1.0).abs() <= 0.2,
        "raw {raw}, sectioned {averaged}"
    );
}

#[test]
fn streams_and_seeds_are_independent_and_reproducible() {
    let freqs: Vec<f64> = (0..100).map(|k| 1e4 + k as f64).collect();
    let mean = vec![1e-12; 100];
    let a = synthesize_nps(&freqs, &mean, 1.0, 10, 3, 0).unwrap();
    assert_eq!(a, synthesize_nps(&freqs, &mean, 1.0, 10, 3, 0).unwrap());
    assert_ne!(
        a.power_mw,
        synthesize_nps(&freqs, &mean, 1.0, 10, 3, 1).unwrap().power_mw
    );
    assert_ne!(
        a.power_mw,
        synthesize_nps(&freqs, &mean, 1.0, 10, 4, 0).unwrap().power_mw
    );
}

fn isolated(cfg: &mut CampaignConfig, budget: NoiseBudget) {
    cfg.noise = budget;
    cfg.grid.start_hz = 1e4;
    cfg.grid.stop_hz = 1e5;
    cfg.grid.step_hz = 100.0;
    cfg.sweep.section_width_hz = 1e4;
    cfg.sweep.n_avg = 1_000_000;
}

fn fitted_a(cfg: &CampaignConfig) -> Vec<(f64, f64)> {
    let rx = cfg.receiver();
    let freqs = cfg.grid.frequencies();
    let spectra: Vec<_> = LENGTHS
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let means = mean_spectra(&rx, l, &freqs).unwrap();
            synthesize_length(cfg, &freqs, &means, i, 1).unwrap()
        })
        .collect();
    let ni: Vec<&NoiseSpectrum> = spectra.iter().map(|s| &s.ni).collect();
    let a: Vec<(f64, f64)> = a_and_pn0_vs_frequency(&LENGTHS, &ni, KappaMode::Fixed(0.5), FitDomain::Linear)
        .unwrap()
        .into_iter()
        .map(|(f, fit)| (f, fit.a_coeff))
        .collect();
    assert_eq!(a.len(), 9);
    a
}

#[test]
fn transit_only_amplitude_follows_the_spectrum_shape() {
    let mut cfg = CampaignConfig::default();
    isolated(
        &mut cfg,
        NoiseBudget {
            projection_per_atom: 0.0,
            probe_laser: FloorTable::default(),
            residual: FloorTable::default(),
            shot_floor_dbm: None,
        },
    );
    let a = fitted_a(&cfg);
    let model: Vec<f64> = a
        .iter()
        .map(|&(f, _)| transit::transit_psd_closed(f, &cfg.transit).unwrap())
        .collect();
    for ((f, got), m) in a.iter().zip(&model) {
        let ratio = got / a[0].1;
        let expected = m / model[0];
        assert!((ratio / expected - 1.0).abs() <= 0.05, "f = {f}: {ratio} vs {expected}");
    }
}

#[test]
fn projection_only_amplitude_is_flat() {
    let mut cfg = CampaignConfig::default();
    isolated(
        &mut cfg,
        NoiseBudget {
            projection_per_atom: superhet::receiver::DEFAULT_PROJECTION_PER_ATOM,
            probe_laser: FloorTable::default(),
            residual: FloorTable::default(),
            shot_floor_dbm: None,
        },
    );
    // transit noise scales with the probe intensity squared, projection noise does not
    cfg.transit.i0 *= 1e-6;
    let a = fitted_a(&cfg);
    for (f, v) in &a {
        assert!((v / a[0].1 - 1.0).abs() <= 0.05, "f = {f}: {v} vs {}", a[0].1);
    }
}

#[test]
fn floor_intercept_stays_in_the_measured_band() {
    let cfg = CampaignConfig::default();
    let rx = cfg.receiver();
    let freqs = cfg.grid.frequencies();
    let spectra: Vec<_> = LENGTHS
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let means = mean_spectra(&rx, l, &freqs).unwrap();
            synthesize_length(&cfg, &freqs, &means, i, 1).unwrap()
        })
        .collect();
    let ni: Vec<&NoiseSpectrum> = spectra.iter().map(|s| &s.ni).collect();
    for (f, fit) in a_and_pn0_vs_frequency(&LENGTHS, &ni, KappaMode::Fixed(0.5), FitDomain::Linear).unwrap() {
        let p0 = mw_to_dbm(fit.p_n0);
        assert!((-121.64..=-112.40).contains(&p0), "P_n0 = {p0} dBm at {f} Hz");
        assert!(!fit.p_n0_clamped);
    }
    for s in &spectra {
        assert!(s.ni.flagged.iter().all(|f| !f), "flagged section");
    }
}

#[test]
fn no_bins_are_flagged_with_default_inputs() {
    let cfg = CampaignConfig::default();
    let rx: Receiver = cfg.receiver();
    let freqs = cfg.grid.frequencies();
    let means = mean_spectra(&rx, LENGTHS[0], &freqs).unwrap();
    let na = synthesize_nps(&freqs, &means.0, 1.0, cfg.sweep.n_avg, 1, 0).unwrap();
    let np = synthesize_nps(&freqs, &means.1, 1.0, cfg.sweep.n_avg, 1, 1).unwrap();
    let ni = superhet::synth::subtract_probe_noise(&na, &np).unwrap();
    assert_eq!(ni.flagged.iter().filter(|f| **f).count(), 0);
}
