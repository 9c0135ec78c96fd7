//! Transit-noise power spectral density of atoms diffusing through a resonant
//! Gaussian beam.
//!
//! With `φ = 2πfω²/(4D)` and `N_a = n_a·π·ω²·l`:
//!
//! ```text
//! P_tn(f) = (π/4)·n_a·l·I₀²·ω²·σ₀² ∫ e^{−2πifτ} / (1 + 4D|τ|/ω²) dτ
//!         = I₀²σ₀²N_aφ/(8πf) · {−2cos φ·Ci(φ) + sin φ·[π − 2Si(φ)]}
//! ```
//!
//! The first line is evaluated by oscillatory quadrature
//! ([`transit_psd_quadrature`]) and serves as the independent check on the
//! closed form ([`transit_psd_closed`]). PSD values are in model units
//! (intensity² · area² per Hz); conversion to analyzer power happens in
//! [`crate::receiver`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::{self, EULER_GAMMA};

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity (F/m).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Optical transition driven by the probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomTransition {
    /// Dipole matrix element (C·m).
    pub mu: f64,
    /// Transition frequency (Hz).
    pub f_l: f64,
    /// Natural linewidth (rad/s).
    pub gamma: f64,
}

impl AtomTransition {
    /// Cs D2 line with an effective dipole moment for π-polarized light.
    pub fn cesium_d2() -> Self {
        AtomTransition {
            mu: 2.697e-29,
            f_l: 3.518e14,
            gamma: 2.0 * PI * 5.22e6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::validation("transition.mu", "must be finite and >= 0"));
        }
        if !(self.f_l > 0.0 && self.f_l.is_finite()) {
            return Err(Error::validation("transition.f_l", "must be finite and > 0"));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::validation("transition.gamma", "must be finite and > 0"));
        }
        Ok(())
    }
}

/// On-resonance absorption cross-section σ₀ = 4πμ²f_l/(ħcε₀Γ) in m².
pub fn absorption_cross_section(t: &AtomTransition) -> f64 {
    4.0 * PI * t.mu * t.mu * t.f_l / (HBAR * SPEED_OF_LIGHT * EPSILON_0 * t.gamma)
}

/// Physical inputs of the transit-noise spectrum, all SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransitParams {
    /// Diffusion constant D (m²/s).
    pub diffusion: f64,
    /// Beam radius ω (m).
    pub omega: f64,
    /// Peak intensity I₀ (W/m²).
    pub i0: f64,
    /// Atom number density n_a (m⁻³).
    pub n_a: f64,
    /// Interaction length l (m).
    pub l: f64,
    /// Absorption cross-section σ₀ (m²).
    pub sigma0: f64,
}

impl Default for TransitParams {
    fn default() -> Self {
        TransitParams {
            diffusion: 0.1,
            omega: 1e-3,
            i0: 44.0,
            n_a: 1e16,
            l: 10e-3,
            sigma0: absorption_cross_section(&AtomTransition::cesium_d2()),
        }
    }
}

impl TransitParams {
    /// Checks the invariants. `n_a = 0` is accepted (empty cell).
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("transit.diffusion", self.diffusion),
            ("transit.omega", self.omega),
            ("transit.i0", self.i0),
            ("transit.l", self.l),
            ("transit.sigma0", self.sigma0),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.n_a >= 0.0 && self.n_a.is_finite()) {
            return Err(Error::validation(
                "transit.n_a",
                format!("must be finite and >= 0, got {}", self.n_a),
            ));
        }
        Ok(())
    }

    /// Atom number inside the interaction region, `n_a·π·ω²·l`.
    pub fn atom_number(&self) -> f64 {
        self.n_a * PI * self.omega * self.omega * self.l
    }

    pub fn with_length(self, l: f64) -> Self {
        TransitParams { l, ..self }
    }
}

fn check_frequency(f: f64) -> Result<()> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::domain(format!("read-out frequency must be positive, got {f}")));
    }
    Ok(())
}

/// Dimensionless transit argument φ = 2πfω²/(4D).
pub fn phi_of(f: f64, p: &TransitParams) -> Result<f64> {
    check_frequency(f)?;
    Ok(2.0 * PI * f * p.omega * p.omega / (4.0 * p.diffusion))
}

/// `−2cos φ·Ci(φ) + sin φ·[π − 2Si(φ)]`.
///
/// Above the special-function crossover this equals `2g(φ)` exactly, which
/// is evaluated directly to avoid cancelling two O(1/φ) terms.
pub fn spectral_bracket(phi: f64) -> Result<f64> {
    if phi > specfun::CROSSOVER {
        let (_, g) = specfun::auxiliary_fg(phi)?;
        return Ok(2.0 * g);
    }
    let (si, ci) = specfun::sici(phi)?;
    let (s, c) = phi.sin_cos();
    Ok(-2.0 * c * ci + s * (PI - 2.0 * si))
}

/// Closed-form transit-noise PSD.
pub fn transit_psd_closed(f: f64, p: &TransitParams) -> Result<f64> {
    let phi = phi_of(f, p)?;
    let n_atoms = p.atom_number();
    if n_atoms == 0.0 {
        return Ok(0.0);
    }
    let prefactor = (p.i0 * p.sigma0).powi(2) * n_atoms * phi / (8.0 * PI * f);
    Ok(prefactor * spectral_bracket(phi)?)
}

/// Transit-noise PSD from direct quadrature of the correlation integral.
///
/// `tol` is the requested relative accuracy, in (1e-12, 1e-3).
pub fn transit_psd_quadrature(f: f64, p: &TransitParams, tol: f64) -> Result<f64> {
    check_frequency(f)?;
    if !(tol > 1e-12 && tol < 1e-3) {
        return Err(Error::domain(format!(
            "quadrature tolerance must lie in (1e-12, 1e-3), got {tol}"
        )));
    }
    if p.n_a == 0.0 {
        return Ok(0.0);
    }
    let rate = 4.0 * p.diffusion / (p.omega * p.omega);
    // integrate in units of the correlation time so the kernel is 1/(1+u)
    let scale = 1.0 / rate;
    let est = quad::integrate_cosine_half_line(|u| 1.0 / (1.0 + u), 2.0 * PI * f * scale, tol, 20_000)?;
    let integral = 2.0 * scale * est.value;
    let prefactor = 0.25 * PI * p.n_a * p.l * (p.i0 * p.omega * p.sigma0).powi(2);
    Ok(prefactor * integral)
}

/// An asymptotic amplitude and whether φ was inside the asymptote's regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptote {
    pub value: f64,
    pub phi: f64,
    pub in_regime: bool,
}

/// Upper φ bound of the in-band regime.
pub const IN_BAND_PHI_MAX: f64 = 1e-2;
/// Lower φ bound of the out-of-band regime.
pub const OUT_OF_BAND_PHI_MIN: f64 = 1e2;

/// Low-frequency (φ → 0) amplitude, √(N_a·|ln φ + γ|/(2D))·I₀σ₀ω/2.
///
/// The bracket tends to −2(γ + ln φ) as φ → 0; that is the logarithm carried
/// here, written in the literature as `log f`.
pub fn in_band_amplitude(f: f64, p: &TransitParams) -> Result<Asymptote> {
    let phi = phi_of(f, p)?;
    let log_term = (phi.ln() + EULER_GAMMA).abs();
    let value = (p.atom_number() * log_term / (2.0 * p.diffusion)).sqrt() * p.i0 * p.sigma0 * p.omega / 2.0;
    Ok(Asymptote {
        value,
        phi,
        in_regime: phi < IN_BAND_PHI_MAX,
    })
}

/// Same asymptote written per unit volume: √(n_a·l·|ln φ + γ|/(2D))·I₀σ₀ω²/2.
pub fn in_band_amplitude_density_form(f: f64, p: &TransitParams) -> Result<f64> {
    let phi = phi_of(f, p)?;
    let log_term = (phi.ln() + EULER_GAMMA).abs();
    Ok((p.n_a * p.l * log_term / (2.0 * p.diffusion)).sqrt() * p.i0 * p.sigma0 * p.omega * p.omega / 2.0 * PI.sqrt())
}

/// High-frequency (φ → ∞) amplitude, √(D·N_a/2)·I₀σ₀/(πfω).
pub fn out_of_band_amplitude(f: f64, p: &TransitParams) -> Result<Asymptote> {
    let phi = phi_of(f, p)?;
    let value = (p.diffusion * p.atom_number() / 2.0).sqrt() * p.i0 * p.sigma0 / (PI * f * p.omega);
    Ok(Asymptote {
        value,
        phi,
        in_regime: phi > OUT_OF_BAND_PHI_MIN,
    })
}

/// Same asymptote per unit volume: √(D·n_a·l/(2π))·I₀σ₀/f.
pub fn out_of_band_amplitude_density_form(f: f64, p: &TransitParams) -> Result<f64> {
    check_frequency(f)?;
    Ok((p.diffusion * p.n_a * p.l / (2.0 * PI)).sqrt() * p.i0 * p.sigma0 / f)
}

/// Read-out frequency at which φ takes the given value.
pub fn frequency_for_phi(phi: f64, p: &TransitParams) -> f64 {
    phi * 4.0 * p.diffusion / (2.0 * PI * p.omega * p.omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> TransitParams {
        TransitParams::default()
    }

    #[test]
    fn cross_section_scales_quadratically() {
        let mut t = AtomTransition::cesium_d2();
        let base = absorption_cross_section(&t);
        t.mu *= 2.0;
        assert_eq!(absorption_cross_section(&t), 4.0 * base);
        t.mu = 0.0;
        assert_eq!(absorption_cross_section(&t), 0.0);
    }

    #[test]
    fn cesium_cross_section_value() {
        // 4π·(2.697e-29)²·3.518e14 / (ħ·c·ε₀·2π·5.22e6), evaluated by hand
        let num = 4.0 * PI * 2.697e-29f64.powi(2) * 3.518e14;
        let den = 1.054_571_817e-34 * 299_792_458.0 * 8.854_187_812_8e-12 * 2.0 * PI * 5.22e6;
        let sigma = absorption_cross_section(&AtomTransition::cesium_d2());
        assert!((sigma - num / den).abs() / sigma < 1e-15);
        assert!((sigma - 3.5024e-13).abs() / sigma < 1e-4);
    }

    #[test]
    fn phi_examples() {
        let p = TransitParams {
            diffusion: 0.1,
            omega: 1e-3,
            ..params()
        };
        let phi = phi_of(1e4, &p).unwrap();
        assert!((phi - 0.157_079_632_679_489_66).abs() < 1e-15);
        assert_eq!(phi_of(2e4, &p).unwrap(), 2.0 * phi);
        let wide = TransitParams { omega: 2e-3, ..p };
        assert!((phi_of(1e4, &wide).unwrap() / phi - 4.0).abs() < 1e-15);
        assert!(phi_of(0.0, &p).is_err());
        assert!(phi_of(-3.0, &p).is_err());
    }

    #[test]
    fn no_atoms_no_noise() {
        let p = TransitParams { n_a: 0.0, ..params() };
        assert_eq!(transit_psd_closed(1e4, &p).unwrap(), 0.0);
        assert_eq!(transit_psd_quadrature(1e4, &p, 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_rejects_bad_frequency() {
        assert!(transit_psd_closed(0.0, &params()).is_err());
        assert!(transit_psd_quadrature(-1.0, &params(), 1e-8).is_err());
        assert!(transit_psd_quadrature(1e4, &params(), 1e-2).is_err());
    }

    #[test]
    fn bracket_matches_literal_form_across_crossover() {
        for &phi in &[15.0, 19.9, 20.1, 25.0, 40.0] {
            let (si, ci) = (specfun::si_series(phi), specfun::ci_series(phi));
            let literal = -2.0 * phi.cos() * ci + phi.sin() * (PI - 2.0 * si);
            let b = spectral_bracket(phi).unwrap();
            assert!((b - literal).abs() < 1e-11, "phi {phi}: {b} vs {literal}");
        }
    }

    #[test]
    fn density_forms_agree() {
        let p = params();
        for &f in &[1.0, 1e2, 1e6] {
            let a = in_band_amplitude(f, &p).unwrap().value;
            let b = in_band_amplitude_density_form(f, &p).unwrap();
            assert!((a - b).abs() / a < 1e-14);
            let a = out_of_band_amplitude(f, &p).unwrap().value;
            let b = out_of_band_amplitude_density_form(f, &p).unwrap();
            assert!((a - b).abs() / a < 1e-14);
        }
    }

    #[test]
    fn in_band_quarter_length_doubles_half() {
        let p = params();
        let f = frequency_for_phi(1e-5, &p);
        let a = in_band_amplitude(f, &p).unwrap().value;
        let b = in_band_amplitude(f, &p.with_length(4.0 * p.l)).unwrap().value;
        assert!((b / a - 2.0).abs() < 1e-14);
    }

    #[test]
    fn regime_flags() {
        let p = params();
        assert!(in_band_amplitude(frequency_for_phi(1e-3, &p), &p).unwrap().in_regime);
        assert!(!in_band_amplitude(frequency_for_phi(1.0, &p), &p).unwrap().in_regime);
        assert!(out_of_band_amplitude(frequency_for_phi(1e3, &p), &p).unwrap().in_regime);
        assert!(!out_of_band_amplitude(frequency_for_phi(1.0, &p), &p).unwrap().in_regime);
    }

    #[test]
    fn out_of_band_halves_with_doubled_frequency() {
        let p = params();
        let a = out_of_band_amplitude(1e6, &p).unwrap().value;
        let b = out_of_band_amplitude(2e6, &p).unwrap().value;
        assert!((a / b - 2.0).abs() < 1e-14);
    }
}
