//! Superhet measurement equation, composite read-out noise budget, SNR and
//! sensitivity versus interaction length.
//!
//! Powers are carried in two unit systems: model units (squared read-out
//! amplitude, or PSD × rbw for noise) and analyzer dBm. They are related by
//! `P_dBm = 10·log10(P_model) + dbm_cal`. Probe-laser, residual and shot
//! floors are specified directly in dBm.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::optics::{self, CellGeometry, LadderConfig};
use crate::transit::{self, TransitParams};
use crate::units::AngularFrequency;

/// Photon shot-noise floor of the probe detection (dBm).
pub const SHOT_FLOOR_DBM: f64 = -113.68;

/// Model-unit to dBm offset.
pub const DEFAULT_DBM_CAL: f64 = 81.352_044;
/// Projection-noise PSD per atom (model units per Hz).
pub const DEFAULT_PROJECTION_PER_ATOM: f64 = 1.484_58e-29;
/// Scale from EIT amplitude/width to read-out amplitude per rad/s of signal Rabi frequency.
pub const DEFAULT_GAIN_CAL: f64 = 7.68e-2;

/// An analyzer power that may be absent (zero linear power).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Power {
    Dbm(f64),
    Absent,
}

impl Power {
    pub fn from_mw(mw: f64) -> Self {
        if mw > 0.0 {
            Power::Dbm(10.0 * mw.log10())
        } else {
            Power::Absent
        }
    }

    pub fn mw(self) -> f64 {
        match self {
            Power::Dbm(d) => dbm_to_mw(d),
            Power::Absent => 0.0,
        }
    }

    pub fn dbm(self) -> Option<f64> {
        match self {
            Power::Dbm(d) => Some(d),
            Power::Absent => None,
        }
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuperhetConfig {
    pub omega_local: AngularFrequency,
    pub omega_sig: AngularFrequency,
    /// Read-out (beat) frequency |f_sig − f_local| in Hz.
    pub f_readout: f64,
    /// Conversion-gain scale: κ₀ = gain_cal · A_EIT / FWHM.
    pub gain_cal: f64,
    /// Offset from model units to dBm.
    pub dbm_cal: f64,
}

impl Default for SuperhetConfig {
    fn default() -> Self {
        SuperhetConfig {
            omega_local: AngularFrequency::from_mhz(7.75),
            omega_sig: AngularFrequency::from_mhz(0.10),
            f_readout: 55e3,
            gain_cal: DEFAULT_GAIN_CAL,
            dbm_cal: DEFAULT_DBM_CAL,
        }
    }
}

impl SuperhetConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.f_readout > 0.0 && self.f_readout.is_finite()) {
            return Err(Error::validation("superhet.f_readout", "must be > 0"));
        }
        if !(self.gain_cal >= 0.0 && self.gain_cal.is_finite()) {
            return Err(Error::validation("superhet.gain_cal", "must be >= 0"));
        }
        if !self.dbm_cal.is_finite() {
            return Err(Error::validation("superhet.dbm_cal", "must be finite"));
        }
        for (name, w) in [("omega_local", self.omega_local), ("omega_sig", self.omega_sig)] {
            if !(w.rad_per_s() >= 0.0 && w.rad_per_s().is_finite()) {
                return Err(Error::validation(format!("superhet.{name}"), "must be >= 0"));
            }
        }
        Ok(())
    }
}

/// Measurement equation `Ω_s = P/κ₀` with `P` the read-out amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementEquation {
    /// Read-out amplitude per rad/s of signal Rabi frequency (model units).
    pub kappa0: f64,
    pub dbm_cal: f64,
}

impl MeasurementEquation {
    pub fn signal_power(&self, omega_sig: f64) -> Power {
        let amplitude = self.kappa0 * omega_sig;
        if amplitude > 0.0 {
            Power::Dbm(20.0 * amplitude.log10() + self.dbm_cal)
        } else {
            Power::Absent
        }
    }

    pub fn rabi_from_power(&self, p: Power) -> Result<f64> {
        if !(self.kappa0 > 0.0) {
            return Err(Error::Calibration(
                "conversion gain is zero; Rabi frequency undefined".into(),
            ));
        }
        match p {
            Power::Absent => Ok(0.0),
            Power::Dbm(d) => Ok(10f64.powf((d - self.dbm_cal) / 20.0) / self.kappa0),
        }
    }
}

/// A floor given as (frequency Hz, dBm) points, interpolated linearly in dB
/// versus log₁₀ f and extrapolated with the end segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct FloorTable(pub Vec<[f64; 2]>);

impl FloorTable {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if self.0.len() == 1 {
            return Err(Error::validation(field, "needs at least two points, or none"));
        }
        for p in &self.0 {
            if !(p[0] > 0.0 && p[0].is_finite() && p[1].is_finite()) {
                return Err(Error::validation(field, "points must be [f_hz > 0, finite dBm]"));
            }
        }
        if self.0.windows(2).any(|w| !(w[1][0] > w[0][0])) {
            return Err(Error::validation(field, "frequencies must be strictly increasing"));
        }
        Ok(())
    }

    /// Floor in dBm at `f`, or `None` for an empty table.
    pub fn dbm_at(&self, f: f64) -> Option<f64> {
        let pts = &self.0;
        if pts.len() < 2 {
            return None;
        }
        let x = f.log10();
        let j = pts.partition_point(|p| p[0] < f).clamp(1, pts.len() - 1);
        let (x0, y0) = (pts[j - 1][0].log10(), pts[j - 1][1]);
        let (x1, y1) = (pts[j][0].log10(), pts[j][1]);
        Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }

    pub fn mw_at(&self, f: f64) -> f64 {
        self.dbm_at(f).map_or(0.0, dbm_to_mw)
    }
}

mod shot_serde {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Level(f64),
        Word(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(d) => s.serialize_f64(*d),
            None => s.serialize_str("off"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Level(x) => Ok(Some(x)),
            Repr::Word(w) if w == "off" => Ok(None),
            Repr::Word(w) => Err(serde::de::Error::custom(format!(
                "expected a dBm level or \"off\", got \"{w}\""
            ))),
        }
    }
}

/// Read-out noise budget. The transit and projection terms scale with the
/// atom number; the floors do not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseBudget {
    /// Projection-noise PSD per atom, frequency-flat (model units per Hz).
    pub projection_per_atom: f64,
    /// Probe-laser intensity noise, present in both the atomic and the
    /// probe-only spectra.
    pub probe_laser: FloorTable,
    /// Residual measurement-system noise present only with atoms in the beam.
    pub residual: FloorTable,
    /// Photon shot-noise floor in dBm, or "off".
    #[serde(with = "shot_serde")]
    pub shot_floor_dbm: Option<f64>,
}

impl Default for NoiseBudget {
    fn default() -> Self {
        NoiseBudget {
            projection_per_atom: DEFAULT_PROJECTION_PER_ATOM,
            probe_laser: FloorTable(vec![[1e3, -109.0], [1e4, -116.0], [1e5, -123.0], [1e6, -130.0]]),
            residual: FloorTable(vec![[1e3, -104.7], [1e4, -112.9], [1e5, -121.1], [1e6, -129.3]]),
            shot_floor_dbm: Some(SHOT_FLOOR_DBM),
        }
    }
}

impl NoiseBudget {
    pub fn validate(&self) -> Result<()> {
        if !(self.projection_per_atom >= 0.0 && self.projection_per_atom.is_finite()) {
            return Err(Error::validation("noise.projection_per_atom", "must be >= 0"));
        }
        self.probe_laser.validate("noise.probe_laser")?;
        self.residual.validate("noise.residual")?;
        if let Some(s) = self.shot_floor_dbm {
            if !s.is_finite() {
                return Err(Error::validation("noise.shot_floor_dbm", "must be finite"));
            }
        }
        Ok(())
    }

    /// Atoms-only budget: no probe-laser, residual or shot floor.
    pub fn atoms_only(&self) -> Self {
        NoiseBudget {
            projection_per_atom: self.projection_per_atom,
            probe_laser: FloorTable::default(),
            residual: FloorTable::default(),
            shot_floor_dbm: None,
        }
    }
}

/// Linear noise powers (mW) in one resolution bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseComponents {
    pub transit: f64,
    pub projection: f64,
    pub probe_laser: f64,
    pub residual: f64,
    pub shot: f64,
}

impl NoiseComponents {
    pub fn atomic(&self) -> f64 {
        self.transit + self.projection
    }

    /// Read-out noise with atoms in the beam, P_na.
    pub fn total(&self) -> f64 {
        self.atomic() + self.residual + self.probe_laser + self.shot
    }

    /// Probe-only reference spectrum, P_np.
    pub fn probe_reference(&self) -> f64 {
        self.probe_laser + self.shot
    }

    /// Interaction noise P_ni = P_na − P_np.
    pub fn interaction(&self) -> f64 {
        self.atomic() + self.residual
    }
}

pub fn noise_components(
    f: f64,
    budget: &NoiseBudget,
    transit_params: &TransitParams,
    rbw: f64,
    dbm_cal: f64,
) -> Result<NoiseComponents> {
    if !(rbw > 0.0 && rbw.is_finite()) {
        return Err(Error::domain(format!(
            "resolution bandwidth must be positive, got {rbw}"
        )));
    }
    let to_mw = 10f64.powf(dbm_cal / 10.0);
    let transit = transit::transit_psd_closed(f, transit_params)? * rbw * to_mw;
    let projection = budget.projection_per_atom * transit_params.atom_number() * rbw * to_mw;
    Ok(NoiseComponents {
        transit,
        projection,
        probe_laser: budget.probe_laser.mw_at(f),
        residual: budget.residual.mw_at(f),
        shot: budget.shot_floor_dbm.map_or(0.0, dbm_to_mw),
    })
}

/// Total read-out noise P_na in dBm.
pub fn total_noise_power(
    f: f64,
    budget: &NoiseBudget,
    transit_params: &TransitParams,
    rbw: f64,
    dbm_cal: f64,
) -> Result<Power> {
    Ok(Power::from_mw(
        noise_components(f, budget, transit_params, rbw, dbm_cal)?.total(),
    ))
}

/// Heterodyne response of the cell at length `l` (m) after the first-order
/// microwave power correction; 1 for a homogeneous field.
pub fn inhomogeneity_factor(l: f64, g: &CellGeometry) -> Result<f64> {
    let response = optics::heterodyne_path_response(l, g)?;
    let correction = optics::calibration_correction(l, g)?;
    Ok(response * 10f64.powf(correction / 20.0))
}

/// Everything needed to evaluate signal, noise and SNR at one length.
#[derive(Debug, Clone, PartialEq)]
pub struct Receiver {
    pub ladder: LadderConfig,
    pub geometry: CellGeometry,
    pub superhet: SuperhetConfig,
    pub transit: TransitParams,
    pub budget: NoiseBudget,
    pub rbw: f64,
}

impl Default for Receiver {
    fn default() -> Self {
        Receiver {
            ladder: LadderConfig::default(),
            geometry: CellGeometry::default(),
            superhet: SuperhetConfig::default(),
            transit: TransitParams::default(),
            budget: NoiseBudget::default(),
            rbw: 1.0,
        }
    }
}

/// One row of the sensitivity table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityPoint {
    pub l_mm: f64,
    pub n_a_db: f64,
    pub p_s: Power,
    pub p_na: Power,
    /// `None` when the signal is absent.
    pub snr_db: Option<f64>,
    pub min_rabi: f64,
}

impl Receiver {
    /// The ideal counterpart: homogeneous field and atoms-only noise.
    pub fn ideal(&self) -> Self {
        Receiver {
            geometry: CellGeometry {
                reflection_r: 0.0,
                ..self.geometry
            },
            budget: self.budget.atoms_only(),
            ..self.clone()
        }
    }

    /// Intrinsic conversion gain κ₀ at length `l_mm`, from the EIT spectrum.
    pub fn kappa0(&self, l_mm: f64) -> Result<f64> {
        let spectrum = optics::eit_transmission(&optics::default_detuning_grid(), &self.ladder.with_length(l_mm))?;
        let (a, w) = optics::extract_amplitude_fwhm(&spectrum)?;
        optics::conversion_gain(a, w, self.superhet.gain_cal)
    }

    /// Measurement equation at `l_mm` including the standing-wave response.
    pub fn measurement(&self, l_mm: f64) -> Result<MeasurementEquation> {
        let h = inhomogeneity_factor(l_mm * 1e-3, &self.geometry)?;
        Ok(MeasurementEquation {
            kappa0: self.kappa0(l_mm)? * h,
            dbm_cal: self.superhet.dbm_cal,
        })
    }

    pub fn signal_power(&self, l_mm: f64) -> Result<Power> {
        Ok(self
            .measurement(l_mm)?
            .signal_power(self.superhet.omega_sig.rad_per_s()))
    }

    pub fn noise(&self, l_mm: f64, f: f64) -> Result<NoiseComponents> {
        noise_components(
            f,
            &self.budget,
            &self.transit.with_length(l_mm * 1e-3),
            self.rbw,
            self.superhet.dbm_cal,
        )
    }

    /// SNR and minimum detectable signal Rabi frequency at the read-out frequency.
    pub fn snr_and_sensitivity(&self, l_mm: f64) -> Result<SensitivityPoint> {
        let eq = self.measurement(l_mm)?;
        let p_s = eq.signal_power(self.superhet.omega_sig.rad_per_s());
        let p_na = Power::from_mw(self.noise(l_mm, self.superhet.f_readout)?.total());
        let snr_db = match (p_s, p_na) {
            (Power::Dbm(s), Power::Dbm(n)) => Some(s - n),
            _ => None,
        };
        Ok(SensitivityPoint {
            l_mm,
            n_a_db: 20.0 * l_mm.log10(),
            p_s,
            p_na,
            snr_db,
            min_rabi: eq.rabi_from_power(p_na)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq() -> MeasurementEquation {
        MeasurementEquation {
            kappa0: 3.7e-7,
            dbm_cal: 12.0,
        }
    }

    #[test]
    fn zero_rabi_is_absent_and_inverts_to_zero() {
        assert_eq!(eq().signal_power(0.0), Power::Absent);
        assert_eq!(eq().rabi_from_power(Power::Absent).unwrap(), 0.0);
    }

    #[test]
    fn doubling_rabi_adds_six_db() {
        let (Power::Dbm(a), Power::Dbm(b)) = (eq().signal_power(1e5), eq().signal_power(2e5)) else {
            panic!("signal absent");
        };
        assert!((b - a - 20.0 * 2f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn zero_gain_has_no_inverse() {
        let e = MeasurementEquation {
            kappa0: 0.0,
            dbm_cal: 0.0,
        };
        assert!(matches!(
            e.rabi_from_power(Power::Dbm(-50.0)),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn floor_table_interpolates_in_log_frequency() {
        let t = NoiseBudget::default().probe_laser;
        assert!((t.dbm_at(1e4).unwrap() + 116.0).abs() < 1e-12);
        assert!((t.dbm_at(10f64.powf(4.5)).unwrap() + 119.5).abs() < 1e-12);
        assert!((t.dbm_at(2e6).unwrap() - (-130.0 - 7.0 * 2f64.log10())).abs() < 1e-9);
        assert_eq!(FloorTable::default().mw_at(1e4), 0.0);
        assert!(FloorTable(vec![[1e4, -100.0]]).validate("x").is_err());
        assert!(FloorTable(vec![[1e5, -100.0], [1e4, -90.0]]).validate("x").is_err());
    }

    #[test]
    fn empty_cell_leaves_probe_and_shot() {
        let budget = NoiseBudget::default();
        let empty = TransitParams {
            n_a: 0.0,
            ..TransitParams::default()
        };
        let c = noise_components(3e4, &budget, &empty, 1.0, DEFAULT_DBM_CAL).unwrap();
        assert_eq!(c.atomic(), 0.0);
        let expected = budget.probe_laser.mw_at(3e4) + dbm_to_mw(SHOT_FLOOR_DBM) + budget.residual.mw_at(3e4);
        assert!((c.total() - expected).abs() / expected < 1e-14);
    }

    #[test]
    fn homogeneous_field_has_unit_response() {
        let g = CellGeometry {
            reflection_r: 0.0,
            ..CellGeometry::default()
        };
        for l in [5e-3, 10.78e-3, 16e-3] {
            assert!((inhomogeneity_factor(l, &g).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_signal_and_noise_is_zero_snr() {
        let rx = Receiver::default();
        let point = rx.snr_and_sensitivity(10.0).unwrap();
        let eq = rx.measurement(10.0).unwrap();
        // the minimum detectable Rabi frequency puts the signal exactly on the noise
        let at_floor = eq.signal_power(point.min_rabi);
        assert!((at_floor.dbm().unwrap() - point.p_na.dbm().unwrap()).abs() < 1e-9);
    }
}
