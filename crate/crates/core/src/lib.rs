//! Simulation and design toolkit for a solar-powered soil humidity controller.
//!
//! The power path runs from a photovoltaic array through a perturb-and-observe
//! MPPT stage and an averaged buck converter into a battery bus. A hysteresis
//! controller reads soil humidity through a capacitive sensor and a 10-bit ADC
//! and switches a water pump that draws from that bus.
//!
//! - [`pv`]: single-diode panel model and brute-force maximum power oracle.
//! - [`converter`]: buck converter design equations and validation.
//! - [`mppt`]: perturb-and-observe duty cycle tracker.
//! - [`storage`]: coulomb-counting battery.
//! - [`soil`]: water balance, sensor and ADC models.
//! - [`control`]: pump hysteresis controller and actuator.
//! - [`sim`]: fixed-step engine and irradiance profiles.

pub mod control;
pub mod converter;
mod error;
pub mod mppt;
pub mod pv;
pub mod sim;
pub mod soil;
pub mod storage;

pub use error::{Error, Result};
