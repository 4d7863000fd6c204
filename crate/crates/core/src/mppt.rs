//! Perturb-and-observe maximum power point tracking.
//!
//! The tracker nudges the converter duty cycle by a fixed step each update
//! and keeps the direction while measured power does not fall. With the
//! battery holding the converter output, the panel sees `V_bat / D`, so
//! raising the duty lowers the panel voltage.

use crate::converter::duty_for_output;
use crate::error::{ensure, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }
}

/// Tuning for the tracker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpptParams {
    pub step: f64,
    pub duty_min: f64,
    pub duty_max: f64,
    /// Run the tracker every `update_every` simulation steps.
    pub update_every: usize,
    /// Starting duty; `None` picks one from the panel's open-circuit voltage.
    pub initial_duty: Option<f64>,
}

impl Default for MpptParams {
    fn default() -> Self {
        Self {
            step: 0.01,
            duty_min: 0.1,
            duty_max: 0.99,
            update_every: 1,
            initial_duty: None,
        }
    }
}

impl MpptParams {
    pub fn validate(&self) -> Result<()> {
        ensure("step", self.step, self.step > 0.0, "must be > 0")?;
        ensure("duty_min", self.duty_min, self.duty_min > 0.0, "must be > 0")?;
        ensure(
            "duty_max",
            self.duty_max,
            self.duty_max > self.duty_min && self.duty_max <= 1.0,
            "must be in (duty_min, 1]",
        )?;
        if self.update_every == 0 {
            return Err(Error::domain("update_every", 0.0, "must be >= 1"));
        }
        if let Some(d) = self.initial_duty {
            ensure(
                "initial_duty",
                d,
                d >= self.duty_min && d <= self.duty_max,
                "must be within [duty_min, duty_max]",
            )?;
        }
        Ok(())
    }

    /// Starting duty for a panel with open-circuit voltage `voc` on a bus at
    /// `v_bat`: aim the panel at 0.76·Voc when a buck can reach it, otherwise
    /// start mid-range.
    pub fn starting_duty(&self, voc: f64, v_bat: f64) -> f64 {
        if let Some(d) = self.initial_duty {
            return d;
        }
        match duty_for_output(0.76 * voc, v_bat) {
            Ok(d) => d.clamp(self.duty_min, self.duty_max),
            Err(_) => 0.5 * (self.duty_min + self.duty_max),
        }
    }
}

/// Tracker memory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpptState {
    pub last_power: f64,
    pub last_duty: f64,
    pub direction: Direction,
    pub step: f64,
    pub duty_min: f64,
    pub duty_max: f64,
}

impl MpptState {
    pub fn new(params: &MpptParams, duty: f64) -> Self {
        Self {
            last_power: 0.0,
            last_duty: duty.clamp(params.duty_min, params.duty_max),
            direction: Direction::Up,
            step: params.step,
            duty_min: params.duty_min,
            duty_max: params.duty_max,
        }
    }

    /// One perturb-and-observe update from a panel measurement. Returns the
    /// next duty command.
    pub fn update(&mut self, v_pv: f64, i_pv: f64) -> f64 {
        let p = v_pv * i_pv;
        // Ties keep direction.
        if p < self.last_power {
            self.direction = self.direction.reversed();
        }
        let target = self.last_duty + self.direction.sign() * self.step;
        let duty = target.clamp(self.duty_min, self.duty_max);
        // A perturbation clipped at a rail cannot be observed; turn back so the
        // tracker does not sit on the rail while irradiance keeps rising.
        if duty != target {
            self.direction = self.direction.reversed();
        }
        self.last_power = p;
        self.last_duty = duty;
        duty
    }
}

/// Panel voltage implied by a duty cycle when the battery fixes the
/// converter output: `V_bat / D`, capped at the panel's open-circuit voltage.
pub fn pv_voltage_from_duty(v_bat: f64, duty: f64, voc: f64) -> Result<f64> {
    ensure("duty", duty, duty > 0.0, "must be > 0")?;
    ensure("v_nominal", v_bat, v_bat > 0.0, "must be > 0")?;
    Ok((v_bat / duty).clamp(0.0, voc.max(0.0)))
}
