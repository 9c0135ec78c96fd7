//! Ladder EIT and Autler–Townes spectra, and the microwave standing wave
//! inside the vapor cell.
//!
//! The probe response is the steady-state weak-probe coherence of a
//! ground → intermediate → Rydberg ladder, optionally with the Rydberg level
//! dressed by a resonant microwave to a fourth level. Doppler averaging is
//! not modeled; `gamma_r` is an effective decoherence rate.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::units::AngularFrequency;

/// Detuning at which the EIT baseline is read.
pub const BASELINE_DETUNING_HZ: f64 = 25e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LadderConfig {
    /// Probe Rabi frequency. Recorded for reference; the weak-probe
    /// susceptibility does not depend on it.
    pub omega_p: AngularFrequency,
    pub omega_c: AngularFrequency,
    /// Intermediate-state decay rate.
    pub gamma_e: AngularFrequency,
    /// Effective Rydberg-state decoherence rate (also used for the
    /// microwave-coupled level).
    pub gamma_r: AngularFrequency,
    pub delta_p: AngularFrequency,
    /// Coupling detuning used by [`transmission_at`]; spectra scan it.
    pub delta_c: AngularFrequency,
    /// Resonant optical depth per millimetre.
    pub od_per_mm: f64,
    /// Interaction length (mm).
    pub l_mm: f64,
    /// Microwave Rabi frequency; zero selects plain EIT.
    pub omega_mw: AngularFrequency,
}

/// 2π × 7.66 MHz effective Rydberg decoherence, which gives a 7.5 MHz
/// half-height width measured against the 25 MHz baseline.
pub const EIT_GAMMA_R_MHZ: f64 = 7.661_73;

/// Intrinsic Rydberg decoherence used for Autler–Townes calibration spectra.
pub const AT_GAMMA_R_MHZ: f64 = 1.0;

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig {
            omega_p: AngularFrequency::from_mhz(6.5),
            omega_c: AngularFrequency::from_mhz(0.26),
            gamma_e: AngularFrequency::from_mhz(5.22),
            gamma_r: AngularFrequency::from_mhz(EIT_GAMMA_R_MHZ),
            delta_p: AngularFrequency::ZERO,
            delta_c: AngularFrequency::ZERO,
            od_per_mm: 5e-4,
            l_mm: 10.0,
            omega_mw: AngularFrequency::ZERO,
        }
    }
}

impl LadderConfig {
    /// Preset for microwave calibration spectra: narrow Rydberg line and the
    /// 2π × 7.75 MHz local microwave.
    pub fn autler_townes() -> Self {
        LadderConfig {
            gamma_r: AngularFrequency::from_mhz(AT_GAMMA_R_MHZ),
            omega_mw: AngularFrequency::from_mhz(7.75),
            ..LadderConfig::default()
        }
    }

    pub fn with_length(self, l_mm: f64) -> Self {
        LadderConfig { l_mm, ..self }
    }

    pub fn validate(&self, section: &str) -> Result<()> {
        let rates = [("gamma_e", self.gamma_e), ("gamma_r", self.gamma_r)];
        for (name, v) in rates {
            if !(v.rad_per_s() > 0.0 && v.rad_per_s().is_finite()) {
                return Err(Error::validation(format!("{section}.{name}"), "must be > 0"));
            }
        }
        if !(self.od_per_mm >= 0.0 && self.od_per_mm.is_finite()) {
            return Err(Error::validation(format!("{section}.od_per_mm"), "must be >= 0"));
        }
        if !(self.l_mm > 0.0 && self.l_mm.is_finite()) {
            return Err(Error::validation(format!("{section}.l_mm"), "must be > 0"));
        }
        for (name, v) in [
            ("omega_c", self.omega_c),
            ("omega_mw", self.omega_mw),
            ("omega_p", self.omega_p),
        ] {
            if !(v.rad_per_s() >= 0.0 && v.rad_per_s().is_finite()) {
                return Err(Error::validation(format!("{section}.{name}"), "must be >= 0"));
            }
        }
        Ok(())
    }

    pub fn optical_depth(&self) -> f64 {
        self.od_per_mm * self.l_mm
    }
}

/// Normalized probe susceptibility at coupling detuning `delta_c` (rad/s).
/// `Im χ̃ = 1` on the bare probe resonance.
pub fn susceptibility(cfg: &LadderConfig, delta_c: f64) -> Complex64 {
    let i = Complex64::i();
    let half_e = 0.5 * cfg.gamma_e.rad_per_s();
    let half_r = 0.5 * cfg.gamma_r.rad_per_s();
    let dp = cfg.delta_p.rad_per_s();
    let two_photon = Complex64::new(half_r, -(dp + delta_c));
    let mut rydberg = two_photon;
    let omega_mw = cfg.omega_mw.rad_per_s();
    if omega_mw > 0.0 {
        rydberg += 0.25 * omega_mw * omega_mw / two_photon;
    }
    let omega_c = cfg.omega_c.rad_per_s();
    let denom = Complex64::new(half_e, -dp) + 0.25 * omega_c * omega_c / rydberg;
    i * half_e / denom
}

/// Probe transmission `exp(−OD·Im χ̃)` at the configured `delta_c`.
pub fn transmission_at(cfg: &LadderConfig) -> f64 {
    (-cfg.optical_depth() * susceptibility(cfg, cfg.delta_c.rad_per_s()).im).exp()
}

/// Probe transmission versus coupling detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct EitSpectrum {
    pub detuning_hz: Vec<f64>,
    pub transmission: Vec<f64>,
    /// Peak transmission above the 25 MHz baseline, when a peak exists.
    pub a_eit: Option<f64>,
    /// Full width at half maximum (Hz), when a peak exists.
    pub fwhm_hz: Option<f64>,
}

/// Uniform detuning grid from `-span_hz` to `span_hz`.
pub fn detuning_grid(span_hz: f64, step_hz: f64) -> Vec<f64> {
    let n = (span_hz / step_hz).round() as i64;
    (-n..=n).map(|k| k as f64 * step_hz).collect()
}

/// ±30 MHz at 10 kHz steps.
pub fn default_detuning_grid() -> Vec<f64> {
    detuning_grid(30e6, 10e3)
}

pub fn eit_transmission(grid_hz: &[f64], cfg: &LadderConfig) -> Result<EitSpectrum> {
    if grid_hz.is_empty() {
        return Err(Error::domain("detuning grid is empty"));
    }
    if grid_hz.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("detuning grid must be strictly increasing"));
    }
    let od = cfg.optical_depth();
    let transmission = grid_hz
        .iter()
        .map(|&d| (-od * susceptibility(cfg, TAU * d).im).exp())
        .collect();
    let mut spectrum = EitSpectrum {
        detuning_hz: grid_hz.to_vec(),
        transmission,
        a_eit: None,
        fwhm_hz: None,
    };
    if let Ok((a, w)) = extract_amplitude_fwhm(&spectrum) {
        spectrum.a_eit = Some(a);
        spectrum.fwhm_hz = Some(w);
    }
    Ok(spectrum)
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    if x < xs[0] || x > *xs.last()? {
        return None;
    }
    let j = xs.partition_point(|&v| v < x);
    if j == 0 {
        return Some(ys[0]);
    }
    let (x0, x1) = (xs[j - 1], xs[j]);
    Some(ys[j - 1] + (ys[j] - ys[j - 1]) * (x - x0) / (x1 - x0))
}

/// Peak height above the ±25 MHz baseline and the full width at half of that
/// height, by linear interpolation between grid points.
pub fn extract_amplitude_fwhm(s: &EitSpectrum) -> Result<(f64, f64)> {
    let xs = &s.detuning_hz;
    let ys = &s.transmission;
    let left = interpolate(xs, ys, -BASELINE_DETUNING_HZ);
    let right = interpolate(xs, ys, BASELINE_DETUNING_HZ);
    let (Some(left), Some(right)) = (left, right) else {
        return Err(Error::Extraction("grid does not cover the ±25 MHz baseline".into()));
    };
    let baseline = 0.5 * (left + right);
    let (peak_idx, &peak) = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Extraction("empty spectrum".into()))?;
    let amplitude = peak - baseline;
    if !(amplitude > 1e-12 * baseline.abs().max(1e-300)) {
        return Err(Error::Extraction("no peak above baseline".into()));
    }
    let half = baseline + 0.5 * amplitude;

    let mut j = peak_idx;
    while j + 1 < ys.len() && ys[j] > half {
        j += 1;
    }
    if ys[j] > half {
        return Err(Error::Extraction(
            "peak does not fall to half height on the right".into(),
        ));
    }
    let x_right = xs[j - 1] + (half - ys[j - 1]) * (xs[j] - xs[j - 1]) / (ys[j] - ys[j - 1]);

    let mut j = peak_idx;
    while j > 0 && ys[j] > half {
        j -= 1;
    }
    if ys[j] > half {
        return Err(Error::Extraction(
            "peak does not fall to half height on the left".into(),
        ));
    }
    let x_left = xs[j] + (half - ys[j]) * (xs[j + 1] - xs[j]) / (ys[j + 1] - ys[j]);

    Ok((amplitude, x_right - x_left))
}

/// Peak-to-peak separation (Hz) of the microwave-dressed doublet.
pub fn at_splitting(cfg: &LadderConfig) -> Result<f64> {
    let omega_mw_hz = cfg.omega_mw.hz();
    if !(omega_mw_hz > 0.0) {
        return Err(Error::Calibration(
            "Autler-Townes splitting needs a microwave field".into(),
        ));
    }
    let width_hz = cfg.gamma_r.hz().max(cfg.omega_c.hz());
    let span = 0.75 * omega_mw_hz + 4.0 * width_hz;
    let grid = detuning_grid(span, span / 4000.0);
    // the doublet shows as peaks of −Im χ̃, independent of optical depth
    let response: Vec<f64> = grid.iter().map(|&d| -susceptibility(cfg, TAU * d).im).collect();

    let edge = response[0].max(*response.last().expect("non-empty grid"));
    let mut peaks: Vec<usize> = (1..response.len() - 1)
        .filter(|&k| response[k] > response[k - 1] && response[k] >= response[k + 1])
        .collect();
    let tallest = peaks.iter().map(|&k| response[k] - edge).fold(0.0, f64::max);
    peaks.retain(|&k| response[k] - edge > 0.1 * tallest);
    if peaks.len() < 2 {
        return Err(Error::Calibration(format!(
            "Autler-Townes doublet not resolved at Omega_mw = 2pi x {:.4} MHz",
            omega_mw_hz / 1e6
        )));
    }
    peaks.sort_by(|&a, &b| response[b].total_cmp(&response[a]));
    let mut positions: Vec<f64> = peaks[..2]
        .iter()
        .map(|&k| {
            // parabolic refinement through the three samples around the maximum
            let (y0, y1, y2) = (response[k - 1], response[k], response[k + 1]);
            let step = grid[k + 1] - grid[k];
            let denom = y0 - 2.0 * y1 + y2;
            let offset = if denom != 0.0 { 0.5 * (y0 - y2) / denom } else { 0.0 };
            grid[k] + offset * step
        })
        .collect();
    positions.sort_by(f64::total_cmp);
    Ok(positions[1] - positions[0])
}

/// Intrinsic conversion gain κ₀ = cal·A_EIT/FWHM.
pub fn conversion_gain(a_eit: f64, fwhm_hz: f64, cal: f64) -> Result<f64> {
    if !(fwhm_hz > 0.0) {
        return Err(Error::domain(format!("EIT width must be positive, got {fwhm_hz}")));
    }
    Ok(cal * a_eit / fwhm_hz)
}

/// Scalar standing-wave model of the microwave inside the cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CellGeometry {
    /// Microwave wavelength (m).
    pub lambda_mw: f64,
    /// Amplitude reflection coefficient of the standing wave, in [0, 1).
    pub reflection_r: f64,
    /// Position of the start of the optical path along the standing wave (m).
    pub z0: f64,
    /// Standing-wave phase of the signal field relative to the local field (rad).
    pub signal_phase: f64,
    /// Interaction length at which the calibration correction is 0 dB (m).
    pub l_ref: f64,
}

/// Local microwave frequency (Hz).
pub const MW_FREQUENCY_HZ: f64 = 6.95e9;

impl Default for CellGeometry {
    fn default() -> Self {
        CellGeometry {
            lambda_mw: crate::transit::SPEED_OF_LIGHT / MW_FREQUENCY_HZ,
            reflection_r: 0.3,
            z0: 7.48e-3,
            signal_phase: 50f64.to_radians(),
            l_ref: 7.28e-3,
        }
    }
}

impl CellGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_mw > 0.0 && self.lambda_mw.is_finite()) {
            return Err(Error::validation("cell.lambda_mw", "must be > 0"));
        }
        if !(0.0..1.0).contains(&self.reflection_r) {
            return Err(Error::validation("cell.reflection_r", "must lie in [0, 1)"));
        }
        if !self.z0.is_finite() || !self.signal_phase.is_finite() {
            return Err(Error::validation("cell.z0", "must be finite"));
        }
        if !(self.l_ref > 0.0 && self.l_ref.is_finite()) {
            return Err(Error::validation("cell.l_ref", "must be > 0"));
        }
        Ok(())
    }

    /// Interaction length equal to a quarter microwave wavelength.
    pub fn quarter_wave(&self) -> f64 {
        0.25 * self.lambda_mw
    }

    fn phase(&self, z: f64) -> f64 {
        4.0 * PI * z / self.lambda_mw
    }

    /// Complex local-oscillator field relative to the incident amplitude.
    pub fn local_field(&self, z: f64) -> Complex64 {
        1.0 + self.reflection_r * Complex64::from_polar(1.0, self.phase(z))
    }

    /// Complex signal field relative to its incident amplitude.
    pub fn signal_field(&self, z: f64) -> Complex64 {
        1.0 + self.reflection_r * Complex64::from_polar(1.0, self.phase(z) + self.signal_phase)
    }
}

/// Standing-wave field magnitude `e0·|1 + r·exp(i4πz/λ)|`.
pub fn mw_field_profile(z: f64, g: &CellGeometry, e0: f64) -> f64 {
    e0 * g.local_field(z).norm()
}

fn path_mean<F: Fn(f64) -> f64>(f: F, g: &CellGeometry, l: f64) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::domain(format!("interaction length must be positive, got {l}")));
    }
    let est = quad::integrate(f, g.z0, g.z0 + l, 1e-300, 1e-13, 4000)?;
    Ok(est.value / l)
}

/// Path average of the local field magnitude over `[z0, z0 + l]`, in units of
/// the incident amplitude.
pub fn path_average_field(l: f64, g: &CellGeometry) -> Result<f64> {
    path_mean(|z| g.local_field(z).norm(), g, l)
}

/// First-order microwave power correction (dB) that keeps the path-averaged
/// local field at its value for `l_ref`.
pub fn calibration_correction(l: f64, g: &CellGeometry) -> Result<f64> {
    let here = path_average_field(l, g)?;
    let reference = path_average_field(g.l_ref, g)?;
    if !(here > 1e-300 && reference > 1e-300) {
        return Err(Error::Calibration("path-averaged field vanishes".into()));
    }
    Ok(0.0 - 20.0 * (here / reference).log10())
}

/// Path-averaged heterodyne response: the signal field projected on the local
/// field's phase, `|⟨E_s·E_lo*/|E_lo|⟩|`, before any power correction.
pub fn heterodyne_path_response(l: f64, g: &CellGeometry) -> Result<f64> {
    let projected = |z: f64| {
        let lo = g.local_field(z);
        g.signal_field(z) * lo.conj() / lo.norm()
    };
    let re = path_mean(|z| projected(z).re, g, l)?;
    let im = path_mean(|z| projected(z).im, g, l)?;
    Ok(re.hypot(im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_limit() {
        let cfg = LadderConfig {
            omega_c: AngularFrequency::ZERO,
            l_mm: 12.0,
            od_per_mm: 0.05,
            ..LadderConfig::default()
        };
        let s = eit_transmission(&[-1e6, 0.0, 1e6], &cfg).unwrap();
        assert!((s.transmission[1] - (-0.05f64 * 12.0).exp()).abs() < 1e-15);
        assert!(s.a_eit.is_none());
    }

    #[test]
    fn empty_or_unsorted_grid_is_rejected() {
        let cfg = LadderConfig::default();
        assert!(eit_transmission(&[], &cfg).is_err());
        assert!(eit_transmission(&[1.0, 0.0], &cfg).is_err());
    }

    #[test]
    fn lorentzian_window_width() {
        let width = 4e6;
        let grid = detuning_grid(30e6, 20e3);
        let transmission = grid
            .iter()
            .map(|&x| 0.5 + 0.1 / (1.0 + (2.0 * x / width).powi(2)))
            .collect();
        let s = EitSpectrum {
            detuning_hz: grid,
            transmission,
            a_eit: None,
            fwhm_hz: None,
        };
        let (a, w) = extract_amplitude_fwhm(&s).unwrap();
        // the baseline sits on the Lorentzian tail at 25 MHz
        let tail = 0.1 / (1.0 + (50e6 / width).powi(2));
        assert!((a - (0.1 - tail)).abs() < 1e-12);
        let half = 0.5 * (0.1 + tail);
        let expected = width * (0.1 / half - 1.0).sqrt();
        assert!((w - expected).abs() <= 20e3, "{w} vs {expected}");
    }

    #[test]
    fn flat_spectrum_has_no_peak() {
        let grid = detuning_grid(30e6, 1e6);
        let s = EitSpectrum {
            transmission: vec![0.9; grid.len()],
            detuning_hz: grid,
            a_eit: None,
            fwhm_hz: None,
        };
        assert!(matches!(extract_amplitude_fwhm(&s), Err(Error::Extraction(_))));
    }

    #[test]
    fn autler_townes_doublet() {
        let cfg = LadderConfig::autler_townes();
        let split = at_splitting(&cfg).unwrap();
        assert!((split / 7.75e6 - 1.0).abs() < 0.02, "{split}");
        let doubled = LadderConfig {
            omega_mw: AngularFrequency::from_mhz(15.5),
            ..cfg
        };
        let split2 = at_splitting(&doubled).unwrap();
        assert!((split2 / split - 2.0).abs() < 0.04);
    }

    #[test]
    fn weak_microwave_is_unresolved() {
        let cfg = LadderConfig {
            omega_mw: AngularFrequency::from_mhz(0.2),
            ..LadderConfig::autler_townes()
        };
        assert!(matches!(at_splitting(&cfg), Err(Error::Calibration(_))));
        let none = LadderConfig {
            omega_mw: AngularFrequency::ZERO,
            ..cfg
        };
        assert!(at_splitting(&none).is_err());
    }

    #[test]
    fn field_profile_limits() {
        let flat = CellGeometry {
            reflection_r: 0.0,
            ..CellGeometry::default()
        };
        for k in 0..10 {
            assert_eq!(mw_field_profile(k as f64 * 1e-3, &flat, 3.0), 3.0);
        }
        let full = CellGeometry {
            reflection_r: 1.0,
            ..CellGeometry::default()
        };
        let node = full.lambda_mw / 4.0;
        assert!(mw_field_profile(node, &full, 1.0) < 1e-15);
    }

    #[test]
    fn correction_is_zero_without_reflection_and_at_reference() {
        let flat = CellGeometry {
            reflection_r: 0.0,
            ..CellGeometry::default()
        };
        for l in [7.28e-3, 10e-3, 16.28e-3] {
            assert!(calibration_correction(l, &flat).unwrap().abs() < 1e-12);
        }
        let g = CellGeometry::default();
        assert_eq!(calibration_correction(g.l_ref, &g).unwrap(), 0.0);
    }

    #[test]
    fn correction_curve_is_monotone_and_bounded() {
        let g = CellGeometry::default();
        let curve: Vec<f64> = (0..9)
            .map(|k| calibration_correction((7.28 + 1.125 * k as f64) * 1e-3, &g).unwrap())
            .collect();
        assert!(curve.iter().all(|c| c.abs() < 3.0));
        let increasing = curve.windows(2).all(|w| w[1] >= w[0]);
        let decreasing = curve.windows(2).all(|w| w[1] <= w[0]);
        assert!(increasing || decreasing, "{curve:?}");
    }

    #[test]
    fn conversion_gain_cases() {
        assert_eq!(
            conversion_gain(2.0, 7.5e6, 3.0).unwrap(),
            2.0 * conversion_gain(1.0, 7.5e6, 3.0).unwrap()
        );
        assert_eq!(conversion_gain(0.0, 7.5e6, 3.0).unwrap(), 0.0);
        assert!(conversion_gain(1.0, 0.0, 3.0).is_err());
    }
}
