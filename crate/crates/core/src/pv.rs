//! Photovoltaic array model.
//!
//! Ideal single-diode law with no series or shunt resistance, explicit in
//! current:
//!
//! ```text
//! I(V) = max(0, Iph - I0 * (exp(V / a) - 1))
//! ```
//!
//! `I0` is calibrated from the datasheet corners so that the curve passes
//! through `(0, Isc)` and `(Voc, 0)` exactly at reference conditions.
//! Temperature shifts the short-circuit current and the open-circuit voltage
//! linearly; the thermal scale `a` follows the open-circuit voltage.

use crate::error::{ensure, Error, Result};

/// Electrical parameters of the PV array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelSpec {
    /// Short-circuit current at reference irradiance and temperature (A).
    pub isc_ref: f64,
    /// Open-circuit voltage at reference irradiance and temperature (V).
    pub voc_ref: f64,
    /// Reference irradiance (W/m²).
    pub g_ref: f64,
    /// Aggregate diode voltage scale `n * Ns * Vt` (V).
    pub a_ref: f64,
    /// Fractional short-circuit current change per kelvin.
    pub temp_coeff_i: f64,
    /// Open-circuit voltage change per kelvin (V/K).
    pub temp_coeff_v: f64,
    /// Reference temperature (K).
    pub t_ref: f64,
}

impl Default for PanelSpec {
    fn default() -> Self {
        Self {
            isc_ref: 5.0,
            voc_ref: 20.0,
            g_ref: 1000.0,
            a_ref: 1.5,
            temp_coeff_i: 0.0,
            temp_coeff_v: 0.0,
            t_ref: 298.15,
        }
    }
}

/// One point on an I-V / P-V curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub voltage: f64,
    pub current: f64,
    pub power: f64,
}

impl OperatingPoint {
    pub fn new(voltage: f64, current: f64) -> Self {
        Self {
            voltage,
            current,
            power: voltage * current,
        }
    }
}

/// Temperature-adjusted diode parameters.
#[derive(Debug, Clone, Copy)]
struct Diode {
    isc: f64,
    a: f64,
    i0: f64,
}

impl PanelSpec {
    pub fn validate(&self) -> Result<()> {
        ensure("isc_ref", self.isc_ref, self.isc_ref > 0.0, "must be > 0")?;
        ensure("voc_ref", self.voc_ref, self.voc_ref > 0.0, "must be > 0")?;
        ensure("g_ref", self.g_ref, self.g_ref > 0.0, "must be > 0")?;
        ensure("a_ref", self.a_ref, self.a_ref > 0.0, "must be > 0")?;
        ensure("temp_coeff_i", self.temp_coeff_i, true, "must be finite")?;
        ensure("temp_coeff_v", self.temp_coeff_v, true, "must be finite")?;
        ensure("t_ref", self.t_ref, self.t_ref > 0.0, "must be > 0 K")?;
        let i0 = self.saturation_current();
        ensure(
            "a_ref",
            self.a_ref,
            i0 > 0.0 && i0.is_finite(),
            "voc_ref / a_ref is too large: saturation current underflows",
        )
    }

    /// Diode saturation current at reference temperature,
    /// `isc_ref / (exp(voc_ref / a_ref) - 1)`.
    pub fn saturation_current(&self) -> f64 {
        self.isc_ref / (self.voc_ref / self.a_ref).exp_m1()
    }

    fn diode(&self, t: f64) -> Result<Diode> {
        ensure("temperature", t, t > 0.0, "must be > 0 K")?;
        let dt = t - self.t_ref;
        let isc = self.isc_ref * (1.0 + self.temp_coeff_i * dt);
        let voc = self.voc_ref + self.temp_coeff_v * dt;
        ensure(
            "temperature",
            t,
            isc > 0.0 && voc > 0.0,
            "temperature coefficients drive Isc or Voc to zero",
        )?;
        // voc / a is temperature invariant, so i0 keeps the (Isc, Voc) corners.
        let a = self.a_ref * voc / self.voc_ref;
        let i0 = isc / (self.voc_ref / self.a_ref).exp_m1();
        Ok(Diode { isc, a, i0 })
    }

    /// Light-generated current, linear in irradiance.
    pub fn photocurrent(&self, g: f64, t: f64) -> Result<f64> {
        ensure("irradiance", g, g >= 0.0, "must be >= 0")?;
        let d = self.diode(t)?;
        Ok((d.isc * g / self.g_ref).max(0.0))
    }

    /// Terminal current at voltage `v`. Exactly zero at and beyond `Voc`.
    pub fn current_at(&self, v: f64, g: f64, t: f64) -> Result<f64> {
        ensure("voltage", v, v >= 0.0, "must be >= 0")?;
        let iph = self.photocurrent(g, t)?;
        let d = self.diode(t)?;
        if v >= d.a * (iph / d.i0).ln_1p() {
            return Ok(0.0);
        }
        Ok((iph - d.i0 * (v / d.a).exp_m1()).max(0.0))
    }

    /// Voltage at which the terminal current reaches zero. Zero in darkness.
    pub fn open_circuit_voltage(&self, g: f64, t: f64) -> Result<f64> {
        let iph = self.photocurrent(g, t)?;
        let d = self.diode(t)?;
        Ok(d.a * (iph / d.i0).ln_1p())
    }

    /// `n` points with voltages evenly spaced over `[0, Voc(g, t)]`.
    pub fn pv_curve(&self, g: f64, t: f64, n: usize) -> Result<Vec<OperatingPoint>> {
        if n < 2 {
            return Err(Error::domain("points", n as f64, "need at least 2 points"));
        }
        self.sweep(g, t, n - 1)
    }

    /// Maximum-power point found by exhaustive search over `resolution`
    /// equal voltage intervals (`resolution + 1` samples). The first sample
    /// wins on ties.
    pub fn mpp_oracle(&self, g: f64, t: f64, resolution: usize) -> Result<OperatingPoint> {
        if resolution < 1000 {
            return Err(Error::domain(
                "resolution",
                resolution as f64,
                "need at least 1000 sweep intervals",
            ));
        }
        let points = self.sweep(g, t, resolution)?;
        let mut best = points[0];
        for p in &points[1..] {
            if p.power > best.power {
                best = *p;
            }
        }
        Ok(best)
    }

    fn sweep(&self, g: f64, t: f64, intervals: usize) -> Result<Vec<OperatingPoint>> {
        let voc = self.open_circuit_voltage(g, t)?;
        (0..=intervals)
            .map(|k| {
                let v = voc * k as f64 / intervals as f64;
                Ok(OperatingPoint::new(v, self.current_at(v, g, t)?))
            })
            .collect()
    }
}
