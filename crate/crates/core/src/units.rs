//! Angular frequencies written the way the lab quotes them.
//!
//! `AngularFrequency` stores the cyclic frequency in Hz and converts to rad/s
//! on demand, so `7.75 MHz_x2pi` round-trips through text exactly. Accepted
//! spellings: `<x> MHz_x2pi`, `<x> kHz_x2pi`, `<x> Hz_x2pi` and `<x> rad/s`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct AngularFrequency {
    hz: f64,
}

impl AngularFrequency {
    pub const ZERO: AngularFrequency = AngularFrequency { hz: 0.0 };

    pub fn from_hz(hz: f64) -> Self {
        AngularFrequency { hz }
    }

    pub fn from_mhz(mhz: f64) -> Self {
        AngularFrequency { hz: mhz * 1e6 }
    }

    pub fn from_rad_per_s(w: f64) -> Self {
        AngularFrequency { hz: w / TAU }
    }

    /// Value in rad/s.
    pub fn rad_per_s(self) -> f64 {
        TAU * self.hz
    }

    /// Cyclic frequency in Hz (the "2π ×" prefactor removed).
    pub fn hz(self) -> f64 {
        self.hz
    }

    pub fn mhz(self) -> f64 {
        self.hz / 1e6
    }

    pub fn scaled(self, k: f64) -> Self {
        AngularFrequency { hz: self.hz * k }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseFrequencyError(String);

impl fmt::Display for ParseFrequencyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseFrequencyError {}

impl FromStr for AngularFrequency {
    type Err = ParseFrequencyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let split = s
            .find(|c: char| c.is_whitespace())
            .ok_or_else(|| ParseFrequencyError(format!("`{s}`: expected `<number> <unit>`, e.g. `7.75 MHz_x2pi`")))?;
        let (number, unit) = s.split_at(split);
        let value: f64 = number
            .parse()
            .map_err(|_| ParseFrequencyError(format!("`{number}` is not a number")))?;
        if !value.is_finite() {
            return Err(ParseFrequencyError(format!("`{number}` is not finite")));
        }
        let hz = match unit.trim() {
            "MHz_x2pi" => value * 1e6,
            "kHz_x2pi" => value * 1e3,
            "Hz_x2pi" => value,
            "rad/s" => value / TAU,
            other => {
                return Err(ParseFrequencyError(format!(
                    "unknown unit `{other}` (use MHz_x2pi, kHz_x2pi, Hz_x2pi or rad/s)"
                )))
            }
        };
        Ok(AngularFrequency { hz })
    }
}

impl fmt::Display for AngularFrequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mhz = self.hz / 1e6;
        if mhz * 1e6 == self.hz {
            write!(f, "{mhz} MHz_x2pi")
        } else {
            write!(f, "{} Hz_x2pi", self.hz)
        }
    }
}

impl Serialize for AngularFrequency {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AngularFrequency {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lab_notation() {
        let w: AngularFrequency = "7.75 MHz_x2pi".parse().unwrap();
        assert_eq!(w.hz(), 7.75e6);
        assert!((w.rad_per_s() - TAU * 7.75e6).abs() < 1e-6);
        let k: AngularFrequency = "55 kHz_x2pi".parse().unwrap();
        assert_eq!(k.hz(), 55e3);
        let r: AngularFrequency = "6.283185307179586 rad/s".parse().unwrap();
        assert!((r.hz() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_text() {
        for bad in ["7.75", "7.75 GHz", "abc MHz_x2pi", "inf MHz_x2pi", ""] {
            assert!(bad.parse::<AngularFrequency>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for hz in [0.0, 7.75e6, 1.0 / 3.0, 5.22e6, 260e3, 123.456] {
            let w = AngularFrequency::from_hz(hz);
            let back: AngularFrequency = w.to_string().parse().unwrap();
            assert_eq!(back, w);
        }
    }
}
