//! Soil water balance, capacitive humidity sensor and ADC quantization.

use crate::error::{ensure, Error, Result};

/// Single-bucket soil water store.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoilState {
    /// Volumetric moisture fraction.
    pub theta: f64,
    /// Water held at `theta = 1` (L).
    pub volume: f64,
    /// Field capacity; above it the soil drains.
    pub theta_fc: f64,
    /// Drainage rate constant (1/s).
    pub drain_coeff: f64,
}

impl Default for SoilState {
    fn default() -> Self {
        Self {
            theta: 0.6,
            volume: 100.0,
            theta_fc: 0.35,
            drain_coeff: 1.0e-5,
        }
    }
}

impl SoilState {
    pub fn validate(&self) -> Result<()> {
        ensure("theta", self.theta, (0.0..=1.0).contains(&self.theta), "must be in [0, 1]")?;
        ensure("volume", self.volume, self.volume > 0.0, "must be > 0")?;
        ensure(
            "theta_fc",
            self.theta_fc,
            self.theta_fc > 0.0 && self.theta_fc <= 1.0,
            "must be in (0, 1]",
        )?;
        ensure("drain_coeff", self.drain_coeff, self.drain_coeff >= 0.0, "must be >= 0")
    }

    /// Gravity drainage above field capacity (L/s).
    pub fn drainage(&self) -> f64 {
        self.drain_coeff * (self.theta - self.theta_fc).max(0.0) * self.volume
    }

    /// Advances the water balance by `dt` with pump inflow and
    /// evapotranspiration in L/s.
    pub fn step(&mut self, pump_inflow: f64, et_rate: f64, dt: f64) -> Result<()> {
        ensure("dt", dt, dt > 0.0, "must be > 0")?;
        ensure("pump_inflow", pump_inflow, pump_inflow >= 0.0, "must be >= 0")?;
        ensure("et_rate", et_rate, et_rate >= 0.0, "must be >= 0")?;
        let net = pump_inflow - et_rate - self.drainage();
        self.theta = (self.theta + net * dt / self.volume).clamp(0.0, 1.0);
        Ok(())
    }
}

/// Sensor transfer curve and ADC settings.
///
/// The sensor output falls as moisture rises. With no `knots` the curve is
/// the straight line from `(0, v_dry)` to `(1, v_wet)`; `knots` add interior
/// `(theta, volts)` points for a measured, piecewise-linear curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorCalibration {
    pub v_supply: f64,
    pub v_dry: f64,
    pub v_wet: f64,
    pub adc_bits: u32,
    pub adc_vref: f64,
    pub knots: Vec<(f64, f64)>,
}

impl Default for SensorCalibration {
    fn default() -> Self {
        Self {
            v_supply: 5.0,
            v_dry: 4.0,
            v_wet: 1.0,
            adc_bits: 10,
            adc_vref: 5.0,
            knots: Vec::new(),
        }
    }
}

impl SensorCalibration {
    pub fn validate(&self) -> Result<()> {
        ensure("v_supply", self.v_supply, self.v_supply > 0.0, "must be > 0")?;
        ensure("v_wet", self.v_wet, self.v_wet >= 0.0, "must be >= 0")?;
        ensure(
            "v_dry",
            self.v_dry,
            self.v_dry > self.v_wet && self.v_dry <= self.v_supply,
            "must satisfy v_wet < v_dry <= v_supply",
        )?;
        if !(1..=31).contains(&self.adc_bits) {
            return Err(Error::domain("adc_bits", self.adc_bits as f64, "must be in [1, 31]"));
        }
        ensure("adc_vref", self.adc_vref, self.adc_vref > 0.0, "must be > 0")?;
        let mut prev = (0.0, self.v_dry);
        for &(theta, v) in &self.knots {
            ensure("knots", theta, theta > prev.0 && theta < 1.0, "theta must increase within (0, 1)")?;
            ensure("knots", v, v < prev.1 && v > self.v_wet, "volts must fall between v_dry and v_wet")?;
            prev = (theta, v);
        }
        Ok(())
    }

    /// Number of ADC codes, `2^adc_bits`.
    pub fn levels(&self) -> u32 {
        1 << self.adc_bits
    }

    pub fn full_scale(&self) -> u32 {
        self.levels() - 1
    }

    fn segments(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        let pts: Vec<(f64, f64)> = std::iter::once((0.0, self.v_dry))
            .chain(self.knots.iter().copied())
            .chain(std::iter::once((1.0, self.v_wet)))
            .collect();
        (0..pts.len() - 1).map(move |k| (pts[k], pts[k + 1]))
    }

    /// Moisture fraction that would produce `v`, clamped to `[0, 1]`.
    fn theta_for_voltage(&self, v: f64) -> f64 {
        if self.knots.is_empty() {
            return ((v - self.v_dry) / (self.v_wet - self.v_dry)).clamp(0.0, 1.0);
        }
        if v >= self.v_dry {
            return 0.0;
        }
        for ((t0, v0), (t1, v1)) in self.segments() {
            if v >= v1 {
                return t0 + (t1 - t0) * (v - v0) / (v1 - v0);
            }
        }
        1.0
    }
}

/// Sensor output voltage at moisture `theta`.
pub fn sensor_voltage(theta: f64, cal: &SensorCalibration) -> Result<f64> {
    ensure("theta", theta, (0.0..=1.0).contains(&theta), "must be in [0, 1]")?;
    if cal.knots.is_empty() {
        return Ok(cal.v_dry + (cal.v_wet - cal.v_dry) * theta);
    }
    let ((t0, v0), (t1, v1)) = cal
        .segments()
        .find(|&(_, (t1, _))| theta <= t1)
        .expect("segments cover [0, 1]");
    Ok(v0 + (v1 - v0) * (theta - t0) / (t1 - t0))
}

/// Floor quantization with a full-scale clamp.
pub fn adc_read(v: f64, cal: &SensorCalibration) -> Result<u32> {
    ensure("voltage", v, v >= 0.0, "must be >= 0")?;
    let code = (v / cal.adc_vref * cal.levels() as f64).floor();
    Ok(code.min(cal.full_scale() as f64) as u32)
}

/// The controller's inverse mapping from ADC code to humidity percent.
pub fn humidity_from_adc(code: u32, cal: &SensorCalibration) -> Result<f64> {
    if code > cal.full_scale() {
        return Err(Error::domain("adc_code", code as f64, "exceeds ADC full scale"));
    }
    let v = code as f64 / cal.levels() as f64 * cal.adc_vref;
    Ok((100.0 * cal.theta_for_voltage(v)).clamp(0.0, 100.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soil_step_examples() {
        let mut s = SoilState { theta: 0.3, theta_fc: 0.4, ..SoilState::default() };
        s.step(0.0, 0.0, 100.0).unwrap();
        assert_eq!(s.theta, 0.3);

        let mut s = SoilState { theta: 0.5, volume: 100.0, drain_coeff: 0.0, ..SoilState::default() };
        s.step(0.01, 0.0, 100.0).unwrap();
        assert!((s.theta - 0.51).abs() < 1e-15);

        let mut s = SoilState { theta: 0.0, ..SoilState::default() };
        s.step(0.0, 0.5, 10.0).unwrap();
        assert_eq!(s.theta, 0.0);

        assert!(s.step(0.0, 0.0, 0.0).is_err());
        assert!(s.step(-1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn drainage_only_above_field_capacity() {
        let s = SoilState { theta: 0.45, theta_fc: 0.35, volume: 100.0, drain_coeff: 1e-3 };
        assert!((s.drainage() - 1e-2).abs() < 1e-15);
        let s = SoilState { theta: 0.3, ..s };
        assert_eq!(s.drainage(), 0.0);
    }

    #[test]
    fn sensor_endpoints_and_midpoint() {
        let cal = SensorCalibration::default();
        assert_eq!(sensor_voltage(0.0, &cal).unwrap(), 4.0);
        assert_eq!(sensor_voltage(1.0, &cal).unwrap(), 1.0);
        assert_eq!(sensor_voltage(0.5, &cal).unwrap(), 2.5);
        assert!(sensor_voltage(1.5, &cal).is_err());
    }

    #[test]
    fn adc_examples() {
        let cal = SensorCalibration::default();
        assert_eq!(adc_read(2.5, &cal).unwrap(), 512);
        assert_eq!(adc_read(0.0, &cal).unwrap(), 0);
        assert_eq!(adc_read(5.0, &cal).unwrap(), 1023);
        assert_eq!(adc_read(7.0, &cal).unwrap(), 1023);
        assert!(adc_read(-0.1, &cal).is_err());
    }

    #[test]
    fn humidity_examples() {
        let cal = SensorCalibration::default();
        // 512 / 1024 * 5 V = 2.5 V exactly, the theta = 0.5 sensor output.
        assert_eq!(humidity_from_adc(512, &cal).unwrap(), 50.0);
        let lsb_pct = 100.0 * cal.adc_vref / ((cal.v_dry - cal.v_wet) * 1024.0);
        // Floor quantization puts the dry code (819 -> 3.999 V) one fraction of
        // an LSB on the wet side of v_dry.
        let dry = humidity_from_adc(adc_read(cal.v_dry, &cal).unwrap(), &cal).unwrap();
        assert!(dry >= 0.0 && dry <= lsb_pct, "{dry}");
        assert_eq!(humidity_from_adc(adc_read(cal.v_supply, &cal).unwrap(), &cal).unwrap(), 0.0);
        assert_eq!(humidity_from_adc(adc_read(cal.v_wet, &cal).unwrap(), &cal).unwrap(), 100.0);
        assert!(humidity_from_adc(1024, &cal).is_err());
    }

    #[test]
    fn knotted_curve_round_trips() {
        let cal = SensorCalibration { knots: vec![(0.3, 3.4), (0.7, 1.6)], ..SensorCalibration::default() };
        cal.validate().unwrap();
        assert!((sensor_voltage(0.3, &cal).unwrap() - 3.4).abs() < 1e-15);
        assert!((sensor_voltage(0.5, &cal).unwrap() - 2.5).abs() < 1e-12);
        assert!((sensor_voltage(0.85, &cal).unwrap() - 1.3).abs() < 1e-12);
        for k in 0..=100 {
            let theta = k as f64 / 100.0;
            let v = sensor_voltage(theta, &cal).unwrap();
            assert!((cal.theta_for_voltage(v) - theta).abs() < 1e-12);
        }
    }

    #[test]
    fn calibration_validation() {
        assert!(SensorCalibration::default().validate().is_ok());
        let bad = SensorCalibration { v_dry: 0.5, ..SensorCalibration::default() };
        assert_eq!(bad.validate().unwrap_err().field(), Some("v_dry"));
        let bad = SensorCalibration { knots: vec![(0.5, 4.5)], ..SensorCalibration::default() };
        assert_eq!(bad.validate().unwrap_err().field(), Some("knots"));
        let bad = SensorCalibration { adc_bits: 0, ..SensorCalibration::default() };
        assert_eq!(bad.validate().unwrap_err().field(), Some("adc_bits"));
    }
}
