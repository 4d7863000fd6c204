//! Fixed-step simulation of the complete system.
//!
//! Each step runs, in order: irradiance lookup, panel operating point from
//! the current duty, averaged converter, battery charge limit, humidity
//! measurement and pump control, battery and soil integration, and finally
//! the MPPT update that sets the duty for the next step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::control::{ControllerState, PumpSpec};
use crate::converter::{power_path, ConverterDesign};
use crate::error::{ensure, Error, Result};
use crate::mppt::{pv_voltage_from_duty, MpptParams, MpptState};
use crate::pv::PanelSpec;
use crate::soil::{adc_read, humidity_from_adc, sensor_voltage, SensorCalibration, SoilState};
use crate::storage::BatteryState;

#[derive(Debug, Clone, PartialEq)]
pub enum IrradianceProfile {
    Constant {
        value: f64,
    },
    /// Piecewise-constant segments `(start s, W/m²)`. Zero before the first
    /// start and from `end` onwards; with no `end` the last level holds.
    ThreeLevel {
        levels: Vec<(f64, f64)>,
        end: Option<f64>,
    },
    /// `peak * max(0, sin(pi t / day_length))`.
    Diurnal {
        peak: f64,
        day_length: f64,
    },
}

impl Default for IrradianceProfile {
    fn default() -> Self {
        IrradianceProfile::Diurnal {
            peak: 1000.0,
            day_length: 86_400.0,
        }
    }
}

impl IrradianceProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            IrradianceProfile::Constant { value } => {
                ensure("value", *value, *value >= 0.0, "must be >= 0")
            }
            IrradianceProfile::ThreeLevel { levels, end } => {
                if levels.is_empty() {
                    return Err(Error::domain("levels", 0.0, "need at least one segment"));
                }
                let mut prev = f64::NEG_INFINITY;
                for &(start, g) in levels {
                    ensure("levels", start, start >= 0.0 && start > prev, "start times must increase from >= 0")?;
                    ensure("levels", g, g >= 0.0, "irradiance must be >= 0")?;
                    prev = start;
                }
                if let Some(end) = end {
                    ensure("end", *end, *end > prev, "must be after the last segment start")?;
                }
                Ok(())
            }
            IrradianceProfile::Diurnal { peak, day_length } => {
                ensure("peak", *peak, *peak >= 0.0, "must be >= 0")?;
                ensure("day_length", *day_length, *day_length > 0.0, "must be > 0")
            }
        }
    }

    /// Irradiance (W/m²) at time `t` seconds.
    pub fn irradiance_at(&self, t: f64) -> f64 {
        match self {
            IrradianceProfile::Constant { value } => *value,
            IrradianceProfile::ThreeLevel { levels, end } => {
                if end.is_some_and(|e| t >= e) {
                    return 0.0;
                }
                levels
                    .iter()
                    .rev()
                    .find(|(start, _)| t >= *start)
                    .map_or(0.0, |&(_, g)| g)
            }
            IrradianceProfile::Diurnal { peak, day_length } => {
                peak * (std::f64::consts::PI * t / day_length).sin().max(0.0)
            }
        }
    }
}

/// Full simulation configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub panel: PanelSpec,
    /// Cell temperature (K), held constant.
    pub temperature: f64,
    pub design: ConverterDesign,
    pub mppt: MpptParams,
    pub battery: BatteryState,
    pub soil: SoilState,
    /// Evapotranspiration (L/s).
    pub et_rate: f64,
    pub sensor: SensorCalibration,
    /// Uniform ADC noise amplitude in codes; 0 disables noise.
    pub adc_noise_lsb: u32,
    pub controller: ControllerState,
    pub pump: PumpSpec,
    /// Finite rainwater store (L); `None` never runs dry.
    pub reservoir: Option<f64>,
    pub profile: IrradianceProfile,
    pub dt: f64,
    pub duration: f64,
    pub seed: u64,
}

impl Default for Scenario {
    fn default() -> Self {
        let panel = PanelSpec::default();
        Self {
            temperature: panel.t_ref,
            panel,
            design: ConverterDesign::default(),
            mppt: MpptParams::default(),
            battery: BatteryState::default(),
            soil: SoilState::default(),
            et_rate: 1.0e-3,
            sensor: SensorCalibration::default(),
            adc_noise_lsb: 0,
            controller: ControllerState::default(),
            pump: PumpSpec::default(),
            reservoir: None,
            profile: IrradianceProfile::default(),
            dt: 1.0,
            duration: 86_400.0,
            seed: 0,
        }
    }
}

fn in_section(section: &'static str) -> impl Fn(Error) -> Error {
    move |e| Error::Section {
        section,
        source: Box::new(e),
    }
}

impl Scenario {
    /// Checks every sub-configuration. Errors name the configuration section.
    pub fn validate(&self) -> Result<()> {
        self.panel.validate().map_err(in_section("panel"))?;
        ensure("temperature", self.temperature, self.temperature > 0.0, "must be > 0 K")
            .map_err(in_section("panel"))?;
        self.design.validate().map_err(in_section("converter"))?;
        self.mppt.validate().map_err(in_section("mppt"))?;
        self.battery.validate().map_err(in_section("battery"))?;
        self.soil.validate().map_err(in_section("soil"))?;
        ensure("et_rate", self.et_rate, self.et_rate >= 0.0, "must be >= 0").map_err(in_section("soil"))?;
        self.sensor.validate().map_err(in_section("sensor"))?;
        ensure(
            "v_supply",
            self.sensor.v_supply,
            self.sensor.v_supply >= 0.0,
            "must be >= 0",
        )
        .map_err(in_section("sensor"))?;
        self.controller.validate().map_err(in_section("controller"))?;
        self.pump.validate().map_err(in_section("pump"))?;
        if let Some(r) = self.reservoir {
            ensure("reservoir", r, r >= 0.0, "must be >= 0").map_err(in_section("pump"))?;
        }
        self.profile.validate().map_err(in_section("profile"))?;
        ensure("dt", self.dt, self.dt > 0.0, "must be > 0").map_err(in_section("sim"))?;
        ensure("duration", self.duration, self.duration >= self.dt, "must be >= dt")
            .map_err(in_section("sim"))?;
        Ok(())
    }

    /// Number of records a run produces, `floor(duration / dt)`.
    pub fn steps(&self) -> usize {
        // Absorb representation error such as 0.3 / 0.1 = 2.9999999999999996.
        (self.duration / self.dt * (1.0 + 1e-12)).floor() as usize
    }
}

/// All observables for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub g: f64,
    pub v_pv: f64,
    pub i_pv: f64,
    pub p_pv: f64,
    /// Duty applied during this step.
    pub duty: f64,
    pub v_out: f64,
    pub i_out: f64,
    pub p_out: f64,
    /// State of charge at the end of the step.
    pub soc: f64,
    /// Soil moisture at the end of the step.
    pub theta: f64,
    /// Measured humidity the controller acted on.
    pub humidity_pct: f64,
    pub adc_code: u32,
    pub pump_on: bool,
    pub flow: f64,
}

/// Stepping engine for one scenario.
#[derive(Debug, Clone)]
pub struct Engine {
    scenario: Scenario,
    battery: BatteryState,
    soil: SoilState,
    controller: ControllerState,
    mppt: MpptState,
    duty: f64,
    reservoir: Option<f64>,
    rng: ChaCha8Rng,
    index: usize,
}

impl Engine {
    pub fn new(scenario: Scenario) -> Result<Self> {
        scenario.validate()?;
        let duty = scenario
            .mppt
            .starting_duty(scenario.panel.voc_ref, scenario.battery.v_nominal);
        Ok(Self {
            battery: scenario.battery,
            soil: scenario.soil,
            controller: scenario.controller,
            mppt: MpptState::new(&scenario.mppt, duty),
            duty,
            reservoir: scenario.reservoir,
            rng: ChaCha8Rng::seed_from_u64(scenario.seed),
            index: 0,
            scenario,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn battery(&self) -> &BatteryState {
        &self.battery
    }

    pub fn soil(&self) -> &SoilState {
        &self.soil
    }

    /// Remaining rainwater, if the reservoir is finite.
    pub fn reservoir(&self) -> Option<f64> {
        self.reservoir
    }

    /// Advances one step; errors carry the step index.
    pub fn step(&mut self) -> Result<TimeSeriesRecord> {
        let index = self.index;
        self.advance().map_err(|e| Error::Step {
            step: index,
            source: Box::new(e),
        })
    }

    fn advance(&mut self) -> Result<TimeSeriesRecord> {
        let s = &self.scenario;
        let dt = s.dt;
        let t = self.index as f64 * dt;

        let g = s.profile.irradiance_at(t);
        let voc = s.panel.open_circuit_voltage(g, s.temperature)?;
        let duty = self.duty;
        let v_pv = pv_voltage_from_duty(self.battery.v_nominal, duty, voc)?;
        let i_pv = s.panel.current_at(v_pv, g, s.temperature)?;
        let out = power_path(v_pv, i_pv, duty, s.design.efficiency);
        let i_charge = self.battery.charge_current_limit(out.i_out);

        let v_sense = sensor_voltage(self.soil.theta, &s.sensor)?;
        let mut adc_code = adc_read(v_sense, &s.sensor)?;
        if s.adc_noise_lsb > 0 {
            let n = s.adc_noise_lsb as i64;
            let noisy = adc_code as i64 + self.rng.gen_range(-n..=n);
            adc_code = noisy.clamp(0, s.sensor.full_scale() as i64) as u32;
        }
        let humidity_pct = humidity_from_adc(adc_code, &s.sensor)?;
        self.controller
            .step(humidity_pct, self.battery.soc, self.battery.soc_low_cutoff);
        if self.reservoir.is_some_and(|r| r <= 0.0) {
            self.controller.pump_on = false;
        }
        let pump_on = self.controller.pump_on;
        let (mut flow, pump_power) = s.pump.output(pump_on);
        if let Some(r) = self.reservoir.as_mut() {
            flow = flow.min(*r / dt);
            *r = (*r - flow * dt).max(0.0);
        }

        self.battery
            .step(i_charge - pump_power / self.battery.v_nominal, dt)?;
        self.soil.step(flow, s.et_rate, dt)?;

        if (self.index + 1) % s.mppt.update_every == 0 {
            self.duty = self.mppt.update(v_pv, i_pv);
        }
        self.index += 1;

        Ok(TimeSeriesRecord {
            t,
            g,
            v_pv,
            i_pv,
            p_pv: v_pv * i_pv,
            duty,
            v_out: out.v_out,
            i_out: out.i_out,
            p_out: out.p_out,
            soc: self.battery.soc,
            theta: self.soil.theta,
            humidity_pct,
            adc_code,
            pump_on,
            flow,
        })
    }
}

/// Runs a scenario to completion.
pub fn run(scenario: &Scenario) -> Result<Vec<TimeSeriesRecord>> {
    let mut engine = Engine::new(scenario.clone())?;
    (0..scenario.steps()).map(|_| engine.step()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diurnal_profile() {
        let p = IrradianceProfile::Diurnal { peak: 800.0, day_length: 1000.0 };
        assert_eq!(p.irradiance_at(0.0), 0.0);
        assert_eq!(p.irradiance_at(500.0), 800.0);
        assert_eq!(p.irradiance_at(1500.0), 0.0);
    }

    #[test]
    fn step_profile() {
        let p = IrradianceProfile::ThreeLevel {
            levels: vec![(0.0, 400.0), (100.0, 700.0), (200.0, 1000.0)],
            end: Some(300.0),
        };
        assert_eq!(p.irradiance_at(150.0), 700.0);
        assert_eq!(p.irradiance_at(0.0), 400.0);
        assert_eq!(p.irradiance_at(299.0), 1000.0);
        assert_eq!(p.irradiance_at(300.0), 0.0);
        let late = IrradianceProfile::ThreeLevel { levels: vec![(10.0, 400.0)], end: None };
        assert_eq!(late.irradiance_at(5.0), 0.0);
        assert_eq!(late.irradiance_at(1e6), 400.0);
    }

    #[test]
    fn profile_validation() {
        let bad = IrradianceProfile::ThreeLevel { levels: vec![(100.0, 1.0), (50.0, 2.0)], end: None };
        assert!(bad.validate().is_err());
        let bad = IrradianceProfile::Constant { value: -1.0 };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn step_count() {
        let s = Scenario { duration: 100.0, dt: 1.0, ..Scenario::default() };
        assert_eq!(run(&s).unwrap().len(), 100);
        let s = Scenario { duration: 0.3, dt: 0.1, ..Scenario::default() };
        assert_eq!(s.steps(), 3);
        let s = Scenario { duration: 10.5, dt: 2.0, ..Scenario::default() };
        assert_eq!(s.steps(), 5);
    }

    #[test]
    fn invalid_scenario_names_section() {
        let mut s = Scenario::default();
        s.battery.capacity = -1.0;
        match Engine::new(s).unwrap_err() {
            Error::Section { section, source } => {
                assert_eq!(section, "battery");
                assert_eq!(source.field(), Some("capacity"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn finite_reservoir_runs_dry() {
        let s = Scenario {
            reservoir: Some(1.0),
            duration: 2000.0,
            soil: SoilState { theta: 0.45, ..SoilState::default() },
            ..Scenario::default()
        };
        let mut e = Engine::new(s).unwrap();
        let recs: Vec<_> = (0..2000).map(|_| e.step().unwrap()).collect();
        let delivered: f64 = recs.iter().map(|r| r.flow).sum();
        assert!((delivered - 1.0).abs() < 1e-12, "{delivered}");
        assert_eq!(e.reservoir(), Some(0.0));
        assert!(!recs.last().unwrap().pump_on);
    }

    #[test]
    fn noise_is_seeded() {
        let s = Scenario { adc_noise_lsb: 3, duration: 200.0, ..Scenario::default() };
        let a = run(&s).unwrap();
        assert_eq!(a, run(&s).unwrap());
        let b = run(&Scenario { seed: 7, ..s.clone() }).unwrap();
        assert_ne!(a, b);
        let clean = run(&Scenario { adc_noise_lsb: 0, ..s }).unwrap();
        assert!(a.iter().zip(&clean).any(|(x, y)| x.adc_code != y.adc_code));
    }
}
