//! Coulomb-counting battery on a fixed-voltage bus.

use crate::error::{ensure, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryState {
    /// State of charge in `[0, 1]`.
    pub soc: f64,
    /// Charge capacity (A·s).
    pub capacity: f64,
    /// Bus voltage (V), independent of charge.
    pub v_nominal: f64,
    /// Below this charge the pump is locked out.
    pub soc_low_cutoff: f64,
    pub max_charge_current: f64,
}

impl Default for BatteryState {
    fn default() -> Self {
        Self {
            soc: 0.5,
            capacity: 7.2 * 3600.0,
            v_nominal: 12.0,
            soc_low_cutoff: 0.2,
            max_charge_current: 5.0,
        }
    }
}

impl BatteryState {
    pub fn validate(&self) -> Result<()> {
        ensure("soc", self.soc, (0.0..=1.0).contains(&self.soc), "must be in [0, 1]")?;
        ensure("capacity", self.capacity, self.capacity > 0.0, "must be > 0")?;
        ensure("v_nominal", self.v_nominal, self.v_nominal > 0.0, "must be > 0")?;
        ensure(
            "soc_low_cutoff",
            self.soc_low_cutoff,
            (0.0..1.0).contains(&self.soc_low_cutoff),
            "must be in [0, 1)",
        )?;
        ensure(
            "max_charge_current",
            self.max_charge_current,
            self.max_charge_current >= 0.0,
            "must be >= 0",
        )
    }

    /// Stored charge (A·s).
    pub fn charge(&self) -> f64 {
        self.soc * self.capacity
    }

    /// Integrates a charge-positive net current over `dt` seconds.
    pub fn step(&mut self, i_net: f64, dt: f64) -> Result<()> {
        ensure("dt", dt, dt > 0.0, "must be > 0")?;
        self.soc = (self.soc + i_net * dt / self.capacity).clamp(0.0, 1.0);
        Ok(())
    }

    /// Current the battery accepts out of `offered`.
    pub fn charge_current_limit(&self, offered: f64) -> f64 {
        if self.soc >= 1.0 {
            0.0
        } else {
            offered.min(self.max_charge_current)
        }
    }
}
