//! Buck converter design equations and the averaged power-path model.
//!
//! Steady state: `Vout = Vin * t1 / T = D * Vin`. Component sizing uses the
//! CCM boundary inductance `L = (1 - D) R / (2 f)` and the ripple-limited
//! capacitance `C = (1 - D) / (16 L f²)`; a built capacitor must exceed the
//! latter strictly.

use crate::error::{ensure, Error, Result};

/// A fully specified buck converter.
///
/// `on_time` and `period` are derived from `duty` and `freq` by
/// [`ConverterDesign::new`]; they are public so that externally supplied
/// timings can be checked by [`validate_design`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConverterDesign {
    pub duty: f64,
    /// Switching frequency (Hz).
    pub freq: f64,
    /// Load resistance (Ω).
    pub load_r: f64,
    /// Inductance (H).
    pub inductance: f64,
    /// Capacitance (F).
    pub capacitance: f64,
    pub efficiency: f64,
    /// Switch on-time `t1` (s).
    pub on_time: f64,
    /// Switching period `T` (s).
    pub period: f64,
}

impl ConverterDesign {
    pub fn new(
        duty: f64,
        freq: f64,
        load_r: f64,
        inductance: f64,
        capacitance: f64,
        efficiency: f64,
    ) -> Self {
        let period = 1.0 / freq;
        Self {
            duty,
            freq,
            load_r,
            inductance,
            capacitance,
            efficiency,
            on_time: duty * period,
            period,
        }
    }

    /// Checks the parameter domains (not the sizing constraints; see
    /// [`validate_design`]).
    pub fn validate(&self) -> Result<()> {
        ensure("duty", self.duty, self.duty > 0.0 && self.duty <= 1.0, "must be in (0, 1]")?;
        ensure("freq", self.freq, self.freq > 0.0, "must be > 0")?;
        ensure("load_r", self.load_r, self.load_r > 0.0, "must be > 0")?;
        ensure("inductance", self.inductance, self.inductance > 0.0, "must be > 0")?;
        ensure("capacitance", self.capacitance, self.capacitance > 0.0, "must be > 0")?;
        ensure(
            "efficiency",
            self.efficiency,
            self.efficiency > 0.0 && self.efficiency <= 1.0,
            "must be in (0, 1]",
        )
    }

    /// Averaged power path at this design's duty cycle.
    pub fn power_path_step(&self, vin: f64, iin: f64) -> PowerPath {
        power_path(vin, iin, self.duty, self.efficiency)
    }
}

impl Default for ConverterDesign {
    fn default() -> Self {
        Self::new(0.5, 25_000.0, 10.0, 2.0e-4, 1.0e-6, 0.9)
    }
}

pub fn output_voltage(vin: f64, duty: f64) -> Result<f64> {
    ensure("duty", duty, (0.0..=1.0).contains(&duty), "must be in [0, 1]")?;
    ensure("vin", vin, vin >= 0.0, "must be >= 0")?;
    Ok(duty * vin)
}

/// Duty cycle that produces `vout` from `vin`.
pub fn duty_for_output(vin: f64, vout: f64) -> Result<f64> {
    ensure("vin", vin, vin > 0.0, "must be > 0")?;
    ensure("vout", vout, vout > 0.0, "must be > 0")?;
    if vout > vin {
        return Err(Error::Infeasible { vin, vout });
    }
    Ok(vout / vin)
}

/// CCM boundary inductance `(1 - D) R / (2 f)`.
pub fn critical_inductance(duty: f64, load_r: f64, freq: f64) -> Result<f64> {
    ensure("duty", duty, (0.0..=1.0).contains(&duty), "must be in [0, 1]")?;
    ensure("load_r", load_r, load_r > 0.0, "must be > 0")?;
    ensure("freq", freq, freq > 0.0, "must be > 0")?;
    Ok((1.0 - duty) * load_r / (2.0 * freq))
}

/// Minimum output capacitance `(1 - D) / (16 L f²)`.
pub fn min_capacitance(duty: f64, inductance: f64, freq: f64) -> Result<f64> {
    ensure("duty", duty, (0.0..=1.0).contains(&duty), "must be in [0, 1]")?;
    ensure("inductance", inductance, inductance > 0.0, "must be > 0")?;
    ensure("freq", freq, freq > 0.0, "must be > 0")?;
    Ok((1.0 - duty) / (16.0 * inductance * freq * freq))
}

/// Averaged converter output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPath {
    pub v_out: f64,
    pub i_out: f64,
    pub p_out: f64,
}

/// Lossy averaged model: `Vout = D Vin` and `Pout = η Pin`.
pub fn power_path(vin: f64, iin: f64, duty: f64, efficiency: f64) -> PowerPath {
    let v_out = duty * vin;
    let p_out = efficiency * vin * iin;
    let i_out = if v_out > 0.0 { p_out / v_out } else { 0.0 };
    PowerPath {
        v_out,
        i_out,
        p_out: if v_out > 0.0 { p_out } else { 0.0 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// `L >= L_crit`
    Inductance,
    /// `C > C_min`
    Capacitance,
    /// `0 < D <= 1`
    DutyRange,
    /// `D = t1 / T` and `f = 1 / T`
    Timing,
}

impl Constraint {
    pub fn describe(self) -> &'static str {
        match self {
            Constraint::Inductance => "inductance >= L_crit",
            Constraint::Capacitance => "capacitance > C_min",
            Constraint::DutyRange => "0 < duty <= 1",
            Constraint::Timing => "duty = t1/T, f = 1/T",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check {
    pub constraint: Constraint,
    /// The computed bound, or the residual for the timing check.
    pub bound: f64,
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    pub l_crit: f64,
    pub c_min: f64,
    pub checks: Vec<Check>,
}

impl DesignReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, constraint: Constraint) -> &Check {
        self.checks
            .iter()
            .find(|c| c.constraint == constraint)
            .expect("every constraint is reported")
    }
}

const TIMING_TOL: f64 = 1e-12;

/// Checks a design against the sizing equations. Failures are report
/// entries; nothing here returns an error.
///
/// `C_min` is evaluated at the critical inductance, so the two bounds are the
/// paired design values for the given duty, load and frequency.
pub fn validate_design(design: &ConverterDesign) -> DesignReport {
    let d = design.duty;
    let duty_ok = d.is_finite() && d > 0.0 && d <= 1.0;
    let d_clamped = if d.is_finite() { d.clamp(0.0, 1.0) } else { 0.0 };

    let l_crit = critical_inductance(d_clamped, design.load_r, design.freq).unwrap_or(f64::NAN);
    let c_min = if d_clamped >= 1.0 {
        0.0
    } else {
        min_capacitance(d_clamped, l_crit, design.freq).unwrap_or(f64::NAN)
    };

    let timing_residual = {
        let duty_res = (design.on_time / design.period - d).abs() / d.abs().max(f64::MIN_POSITIVE);
        let freq_res = (design.freq * design.period - 1.0).abs();
        duty_res.max(freq_res)
    };

    let checks = vec![
        Check {
            constraint: Constraint::Inductance,
            bound: l_crit,
            value: design.inductance,
            pass: design.inductance >= l_crit,
        },
        Check {
            constraint: Constraint::Capacitance,
            bound: c_min,
            value: design.capacitance,
            pass: design.capacitance > c_min,
        },
        Check {
            constraint: Constraint::DutyRange,
            bound: 1.0,
            value: d,
            pass: duty_ok,
        },
        Check {
            constraint: Constraint::Timing,
            bound: TIMING_TOL,
            value: timing_residual,
            pass: timing_residual <= TIMING_TOL,
        },
    ];
    DesignReport {
        l_crit,
        c_min,
        checks,
    }
}
