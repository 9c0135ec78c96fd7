//! Simulation of a Rydberg-atom superheterodyne microwave receiver: special
//! functions, transit noise, ladder optics, the receiver noise budget,
//! synthetic spectra, power-law fits and the campaign driver.

pub mod campaign;
pub mod config;
pub mod error;
pub mod fit;
pub mod optics;
pub mod quad;
pub mod receiver;
pub mod specfun;
pub mod synth;
pub mod transit;
pub mod units;

pub use error::{Error, Result};
pub use units::AngularFrequency;
