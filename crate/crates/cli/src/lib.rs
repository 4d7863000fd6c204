//! Command implementations behind the `soilpower` binary.
//!
//! Each command takes parsed [`Settings`] and returns its full output as a
//! string so that callers (the binary, tests) control where it goes.

pub mod config;
mod format;

use std::fmt::Write as _;

use soilpower::converter::{duty_for_output, validate_design, DesignReport};
use soilpower::sim::Engine;
use thiserror::Error;

pub use config::{load, parse_config, ConfigError, Settings};
pub use format::sig9;

/// Header of the `simulate` CSV.
pub const SIMULATE_HEADER: &str =
    "t_s,g_wm2,v_pv,i_pv,p_pv,duty,v_out,i_out,p_out,soc,theta,humidity_pct,adc_code,pump_on,flow_lps";

/// Header of the `curve` CSV.
pub const CURVE_HEADER: &str = "g_wm2,voltage_v,current_a,power_w";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{0}")]
    Model(soilpower::Error),

    #[error("{0}")]
    Infeasible(soilpower::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl From<soilpower::Error> for CliError {
    fn from(e: soilpower::Error) -> Self {
        match e {
            soilpower::Error::Infeasible { .. } => CliError::Infeasible(e),
            other => CliError::Model(other),
        }
    }
}

impl CliError {
    /// Process exit status for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(ConfigError::Syntax { .. }) => 2,
            CliError::Config(ConfigError::UnknownKey { .. }) => 3,
            CliError::Config(ConfigError::Invalid { .. }) | CliError::Model(_) => 4,
            CliError::Infeasible(_) => 5,
            CliError::Io { .. } => 6,
        }
    }
}

/// Result of the `design` command.
#[derive(Debug, Clone)]
pub struct DesignOutcome {
    pub report: DesignReport,
    pub text: String,
}

impl DesignOutcome {
    /// 0 when every constraint passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.report.all_pass() {
            0
        } else {
            1
        }
    }
}

/// Sizes and checks the converter. With both `vin` and `vout` configured the
/// duty cycle is derived from them.
pub fn cmd_design(settings: &Settings) -> Result<DesignOutcome, CliError> {
    let mut design = settings.scenario.design;
    let targets = settings.targets;
    if let (Some(vin), Some(vout)) = (targets.vin, targets.vout) {
        let duty = duty_for_output(vin, vout)?;
        design.on_time = duty * design.period;
        design.duty = duty;
    }
    let report = validate_design(&design);

    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "buck converter design").unwrap();
    if let (Some(vin), Some(vout)) = (targets.vin, targets.vout) {
        writeln!(w, "  vin          = {vin} V").unwrap();
        writeln!(w, "  vout         = {vout} V").unwrap();
        writeln!(w, "  duty         = {} (vout / vin)", design.duty).unwrap();
    } else {
        writeln!(w, "  duty         = {}", design.duty).unwrap();
    }
    writeln!(w, "  freq         = {} Hz", design.freq).unwrap();
    writeln!(w, "  period       = {:e} s", design.period).unwrap();
    writeln!(w, "  on_time      = {:e} s", design.on_time).unwrap();
    writeln!(w, "  load_r       = {} ohm", design.load_r).unwrap();
    writeln!(w, "  inductance   = {:e} H", design.inductance).unwrap();
    writeln!(w, "  capacitance  = {:e} F", design.capacitance).unwrap();
    writeln!(w, "  L_crit       = {:e} H", report.l_crit).unwrap();
    writeln!(w, "  C_min        = {:e} F", report.c_min).unwrap();
    writeln!(w).unwrap();
    writeln!(w, "{:<24} {:>14} {:>14}  result", "constraint", "bound", "value").unwrap();
    for c in &report.checks {
        writeln!(
            w,
            "{:<24} {:>14} {:>14}  {}",
            c.constraint.describe(),
            format!("{:.6e}", c.bound),
            format!("{:.6e}", c.value),
            if c.pass { "PASS" } else { "FAIL" }
        )
        .unwrap();
    }
    writeln!(w).unwrap();
    writeln!(w, "overall: {}", if report.all_pass() { "PASS" } else { "FAIL" }).unwrap();
    Ok(DesignOutcome { report, text: out })
}

/// P-V curves, one block per configured irradiance level, followed by one
/// `# mpp` comment line per level.
pub fn cmd_curve(settings: &Settings) -> Result<String, CliError> {
    let s = &settings.scenario;
    let c = &settings.curve;
    let mut out = String::new();
    writeln!(out, "{CURVE_HEADER}").unwrap();
    let mut footer = String::new();
    for &g in &c.levels {
        for p in s.panel.pv_curve(g, s.temperature, c.points)? {
            writeln!(out, "{},{},{},{}", sig9(g), sig9(p.voltage), sig9(p.current), sig9(p.power)).unwrap();
        }
        let m = s.panel.mpp_oracle(g, s.temperature, c.resolution)?;
        writeln!(footer, "# mpp g_wm2={} voltage_v={} power_w={}", sig9(g), sig9(m.voltage), sig9(m.power))
            .unwrap();
    }
    out.push_str(&footer);
    Ok(out)
}

/// Runs the scenario and renders one CSV row per step.
pub fn cmd_simulate(settings: &Settings) -> Result<String, CliError> {
    let scenario = &settings.scenario;
    let mut engine = Engine::new(scenario.clone())?;
    let mut out = String::with_capacity(scenario.steps() * 160);
    writeln!(out, "{SIMULATE_HEADER}").unwrap();
    for _ in 0..scenario.steps() {
        let r = engine.step()?;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            sig9(r.t),
            sig9(r.g),
            sig9(r.v_pv),
            sig9(r.i_pv),
            sig9(r.p_pv),
            sig9(r.duty),
            sig9(r.v_out),
            sig9(r.i_out),
            sig9(r.p_out),
            sig9(r.soc),
            sig9(r.theta),
            sig9(r.humidity_pct),
            r.adc_code,
            u8::from(r.pump_on),
            sig9(r.flow),
        )
        .unwrap();
    }
    Ok(out)
}
