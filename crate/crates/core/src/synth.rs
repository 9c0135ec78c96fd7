//! Synthetic noise power spectra and the data reduction applied to them:
//! probe-noise subtraction and 1 kHz section averaging.
//!
//! Each bin is an averaged periodogram: gamma distributed with shape `n_avg`
//! and the budget mean, so its relative standard deviation is `1/√n_avg`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::receiver::mw_to_dbm;

/// Uniform frequency grid `start, start + step, …` strictly below `stop`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrequencyGrid {
    pub start_hz: f64,
    pub stop_hz: f64,
    pub step_hz: f64,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        FrequencyGrid {
            start_hz: 10e3,
            stop_hz: 100e3,
            step_hz: 1.0,
        }
    }
}

impl FrequencyGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.start_hz > 0.0 && self.start_hz.is_finite()) {
            return Err(Error::validation("grid.start_hz", "must be > 0"));
        }
        if !(self.stop_hz > self.start_hz && self.stop_hz.is_finite()) {
            return Err(Error::validation("grid.stop_hz", "must exceed start_hz"));
        }
        if !(self.step_hz > 0.0 && self.step_hz <= self.stop_hz - self.start_hz) {
            return Err(Error::validation(
                "grid.step_hz",
                "must be > 0 and no wider than the grid",
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.stop_hz - self.start_hz) / self.step_hz - 1e-9).ceil() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| self.start_hz + k as f64 * self.step_hz)
            .collect()
    }
}

/// Per-bin analyzer powers (linear mW) on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpectrum {
    pub freqs: Vec<f64>,
    pub power_mw: Vec<f64>,
    /// Bins excluded from downstream averaging (non-positive after subtraction).
    pub flagged: Vec<bool>,
    pub rbw: f64,
    pub n_avg: u32,
    pub seed: u64,
}

impl NoiseSpectrum {
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Bin power in dBm; `None` for flagged or non-positive bins.
    pub fn dbm(&self, i: usize) -> Option<f64> {
        (!self.flagged[i] && self.power_mw[i] > 0.0).then(|| mw_to_dbm(self.power_mw[i]))
    }

    /// Index of the bin whose frequency is closest to `f`.
    pub fn nearest(&self, f: f64) -> Option<usize> {
        let j = self.freqs.partition_point(|&x| x < f);
        match (j.checked_sub(1), (j < self.freqs.len()).then_some(j)) {
            (Some(a), Some(b)) => Some(if f - self.freqs[a] <= self.freqs[b] - f { a } else { b }),
            (Some(a), None) => Some(a),
            (None, b) => b,
        }
    }
}

/// Relative atom number 20·log₁₀(l / 1 mm) in dB.
pub fn relative_atom_number(l_mm: f64) -> Result<f64> {
    if !(l_mm > 0.0 && l_mm.is_finite()) {
        return Err(Error::domain(format!(
            "interaction length must be positive, got {l_mm} mm"
        )));
    }
    Ok(20.0 * l_mm.log10())
}

/// Draws an averaged-periodogram spectrum around `mean_mw`.
///
/// `stream` selects an independent ChaCha stream under the same `seed`, so a
/// campaign can give every (length, spectrum kind) its own sequence.
pub fn synthesize_nps(
    freqs: &[f64],
    mean_mw: &[f64],
    rbw: f64,
    n_avg: u32,
    seed: u64,
    stream: u64,
) -> Result<NoiseSpectrum> {
    if freqs.len() != mean_mw.len() {
        return Err(Error::Alignment(format!(
            "{} frequencies but {} mean powers",
            freqs.len(),
            mean_mw.len()
        )));
    }
    if n_avg == 0 {
        return Err(Error::domain("n_avg must be at least 1"));
    }
    if !(rbw > 0.0) {
        return Err(Error::domain(format!(
            "resolution bandwidth must be positive, got {rbw}"
        )));
    }
    if let Some(bad) = mean_mw.iter().find(|m| !(**m >= 0.0 && m.is_finite())) {
        return Err(Error::domain(format!("mean power must be finite and >= 0, got {bad}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let shape = f64::from(n_avg);
    let unit = Gamma::new(shape, 1.0 / shape).map_err(|e| Error::domain(e.to_string()))?;
    let power_mw = mean_mw.iter().map(|&m| m * unit.sample(&mut rng)).collect();
    Ok(NoiseSpectrum {
        freqs: freqs.to_vec(),
        power_mw,
        flagged: vec![false; freqs.len()],
        rbw,
        n_avg,
        seed,
    })
}

fn check_aligned(a: &NoiseSpectrum, b: &NoiseSpectrum) -> Result<()> {
    if a.freqs != b.freqs {
        return Err(Error::Alignment("frequency grids differ".into()));
    }
    if a.rbw != b.rbw {
        return Err(Error::Alignment(format!("rbw {} vs {}", a.rbw, b.rbw)));
    }
    Ok(())
}

/// Interaction noise `P_na − P_np` per bin; non-positive bins are flagged.
pub fn subtract_probe_noise(p_na: &NoiseSpectrum, p_np: &NoiseSpectrum) -> Result<NoiseSpectrum> {
    check_aligned(p_na, p_np)?;
    let power_mw: Vec<f64> = p_na.power_mw.iter().zip(&p_np.power_mw).map(|(a, b)| a - b).collect();
    let flagged = power_mw
        .iter()
        .zip(p_na.flagged.iter().zip(&p_np.flagged))
        .map(|(&p, (&fa, &fb))| fa || fb || p <= 0.0)
        .collect();
    Ok(NoiseSpectrum {
        freqs: p_na.freqs.clone(),
        power_mw,
        flagged,
        rbw: p_na.rbw,
        n_avg: p_na.n_avg,
        seed: p_na.seed,
    })
}

/// Linear mean of unflagged bins within consecutive `width_hz` sections
/// anchored at the first grid frequency. Output bins sit at section centers;
/// sections left empty by flagging are dropped.
pub fn section_average(s: &NoiseSpectrum, width_hz: f64) -> Result<NoiseSpectrum> {
    if !(width_hz > 0.0) {
        return Err(Error::domain(format!("section width must be positive, got {width_hz}")));
    }
    let (Some(&first), Some(&last)) = (s.freqs.first(), s.freqs.last()) else {
        return Err(Error::domain("cannot section an empty spectrum"));
    };
    if last - first + s.rbw < width_hz {
        return Err(Error::domain(format!(
            "spectrum spans {} Hz, narrower than one {width_hz} Hz section",
            last - first + s.rbw
        )));
    }
    let mut out = NoiseSpectrum {
        freqs: Vec::new(),
        power_mw: Vec::new(),
        flagged: Vec::new(),
        rbw: s.rbw,
        n_avg: s.n_avg,
        seed: s.seed,
    };
    let mut start = 0;
    while start < s.len() {
        let k = ((s.freqs[start] - first) / width_hz + 1e-9).floor();
        let upper = first + (k + 1.0) * width_hz;
        let end = start + s.freqs[start..].partition_point(|&f| f < upper - 1e-9 * width_hz);
        let (sum, count) = (start..end)
            .filter(|&i| !s.flagged[i])
            .fold((0.0, 0usize), |(acc, n), i| (acc + s.power_mw[i], n + 1));
        let center = first + (k + 0.5) * width_hz;
        if count == 0 {
            log::warn!("section at {center} Hz has no unflagged bins; dropped");
        } else {
            out.freqs.push(center);
            out.power_mw.push(sum / count as f64);
            out.flagged.push(false);
        }
        start = end;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(n: usize, level: f64) -> NoiseSpectrum {
        let freqs: Vec<f64> = (0..n).map(|k| 1e4 + k as f64).collect();
        NoiseSpectrum {
            power_mw: vec![level; n],
            flagged: vec![false; n],
            freqs,
            rbw: 1.0,
            n_avg: 1,
            seed: 0,
        }
    }

    #[test]
    fn atom_number_reference_points() {
        assert_eq!(relative_atom_number(1.0).unwrap(), 0.0);
        assert!((relative_atom_number(10.0).unwrap() - 20.0).abs() < 1e-14);
        assert!((relative_atom_number(10.78).unwrap() - 20.65).abs() < 0.01);
        assert!(relative_atom_number(0.0).is_err());
        assert!(relative_atom_number(-1.0).is_err());
    }

    #[test]
    fn default_grid_has_ninety_thousand_bins() {
        let g = FrequencyGrid::default();
        assert_eq!(g.len(), 90_000);
        let f = g.frequencies();
        assert_eq!(f[0], 10e3);
        assert_eq!(*f.last().unwrap(), 99_999.0);
    }

    #[test]
    fn synthesis_is_deterministic_and_stream_separated() {
        let freqs = vec![1.0, 2.0, 3.0];
        let mean = vec![1.0, 2.0, 3.0];
        let a = synthesize_nps(&freqs, &mean, 1.0, 10, 42, 0).unwrap();
        let b = synthesize_nps(&freqs, &mean, 1.0, 10, 42, 0).unwrap();
        let c = synthesize_nps(&freqs, &mean, 1.0, 10, 42, 1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.power_mw, c.power_mw);
        assert!(synthesize_nps(&freqs, &mean, 1.0, 0, 42, 0).is_err());
        assert!(synthesize_nps(&freqs, &mean[..2], 1.0, 1, 42, 0).is_err());
    }

    #[test]
    fn large_n_avg_approaches_the_mean() {
        let freqs: Vec<f64> = (0..200).map(f64::from).collect();
        let mean = vec![3.0e-12; 200];
        let s = synthesize_nps(&freqs, &mean, 1.0, 1_000_000, 7, 0).unwrap();
        assert!(s.power_mw.iter().all(|p| (p / 3.0e-12 - 1.0).abs() < 0.005));
    }

    #[test]
    fn subtraction_cases() {
        let a = flat(10, 2.0);
        let zero = flat(10, 0.0);
        assert_eq!(subtract_probe_noise(&a, &zero).unwrap().power_mw, a.power_mw);
        let same = subtract_probe_noise(&a, &a).unwrap();
        assert!(same.flagged.iter().all(|&f| f));
        let mut shifted = flat(10, 1.0);
        shifted.freqs[3] += 0.5;
        assert!(matches!(subtract_probe_noise(&a, &shifted), Err(Error::Alignment(_))));
    }

    #[test]
    fn sectioning_counts_and_preserves_constants() {
        let s = flat(90_000, 4.0);
        let sec = section_average(&s, 1000.0).unwrap();
        assert_eq!(sec.len(), 90);
        assert_eq!(sec.freqs[0], 10_500.0);
        assert_eq!(sec.freqs[45], 55_500.0);
        assert!(sec.power_mw.iter().all(|&p| p == 4.0));
    }

    #[test]
    fn fully_flagged_section_is_dropped() {
        let mut s = flat(3000, 1.0);
        for f in &mut s.flagged[1000..2000] {
            *f = true;
        }
        let sec = section_average(&s, 1000.0).unwrap();
        assert_eq!(sec.freqs, vec![10_500.0, 12_500.0]);
        assert!(section_average(&flat(10, 1.0), 1000.0).is_err());
    }

    #[test]
    fn nearest_bin() {
        let s = flat(5, 1.0);
        assert_eq!(s.nearest(0.0), Some(0));
        assert_eq!(s.nearest(10_002.4), Some(2));
        assert_eq!(s.nearest(1e9), Some(4));
    }
}
