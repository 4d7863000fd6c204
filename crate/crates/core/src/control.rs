//! Pump hysteresis controller with low-battery lockout.

use crate::error::{ensure, Result};

/// Switches the pump on when humidity drops to `setpoint` and off once it
/// reaches `setpoint + hysteresis`. A battery below its cutoff forces the
/// pump off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerState {
    /// Humidity (%) at or below which the pump starts.
    pub setpoint: f64,
    /// Width of the dead band above the setpoint (%).
    pub hysteresis: f64,
    pub pump_on: bool,
    pub lockout: bool,
}

impl Default for ControllerState {
    fn default() -> Self {
        Self {
            setpoint: 50.0,
            hysteresis: 5.0,
            pump_on: false,
            lockout: false,
        }
    }
}

impl ControllerState {
    pub fn validate(&self) -> Result<()> {
        ensure(
            "setpoint",
            self.setpoint,
            (0.0..=100.0).contains(&self.setpoint),
            "must be in [0, 100]",
        )?;
        ensure("hysteresis", self.hysteresis, self.hysteresis > 0.0, "must be > 0")?;
        ensure(
            "hysteresis",
            self.hysteresis,
            self.setpoint + self.hysteresis <= 100.0,
            "setpoint + hysteresis must not exceed 100",
        )
    }

    pub fn off_threshold(&self) -> f64 {
        self.setpoint + self.hysteresis
    }

    pub fn step(&mut self, humidity: f64, soc: f64, soc_low_cutoff: f64) {
        self.lockout = soc < soc_low_cutoff;
        if self.lockout {
            self.pump_on = false;
        } else if humidity <= self.setpoint {
            self.pump_on = true;
        } else if humidity >= self.off_threshold() {
            self.pump_on = false;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec {
    /// Delivery when running (L/s).
    pub flow_rate: f64,
    /// Electrical draw when running (W).
    pub electrical_power: f64,
}

impl Default for PumpSpec {
    fn default() -> Self {
        Self {
            flow_rate: 0.02,
            electrical_power: 24.0,
        }
    }
}

impl PumpSpec {
    pub fn validate(&self) -> Result<()> {
        ensure("flow_rate", self.flow_rate, self.flow_rate > 0.0, "must be > 0")?;
        ensure(
            "electrical_power",
            self.electrical_power,
            self.electrical_power > 0.0,
            "must be > 0",
        )
    }

    /// `(flow L/s, load W)` for the given switch state.
    pub fn output(&self, on: bool) -> (f64, f64) {
        if on {
            (self.flow_rate, self.electrical_power)
        } else {
            (0.0, 0.0)
        }
    }
}
