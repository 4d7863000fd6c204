//! Scenario configuration files.
//!
//! The format is TOML restricted to a fixed set of sections and keys. Every
//! key is optional and falls back to the demo default; any key outside the
//! table below is rejected.
//!
//! | section      | keys |
//! |--------------|------|
//! | `panel`      | isc_ref voc_ref g_ref a_ref temp_coeff_i temp_coeff_v t_ref temperature |
//! | `converter`  | duty freq load_r inductance capacitance efficiency on_time period vin vout |
//! | `mppt`       | step duty_min duty_max update_every initial_duty |
//! | `battery`    | soc capacity v_nominal soc_low_cutoff max_charge_current |
//! | `soil`       | theta volume theta_fc drain_coeff et_rate |
//! | `sensor`     | v_supply v_dry v_wet adc_bits adc_vref knots noise_lsb |
//! | `controller` | setpoint hysteresis |
//! | `pump`       | flow_rate electrical_power reservoir |
//! | `profile`    | kind value levels end peak day_length |
//! | `sim`        | dt duration seed |
//! | `curve`      | levels points resolution |

use soilpower::converter::ConverterDesign;
use soilpower::sim::{IrradianceProfile, Scenario};
use soilpower::Error;
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("syntax error at {location}: {message}")]
    Syntax { location: String, message: String },

    #[error("unknown key `{key}`")]
    UnknownKey { key: String },

    #[error("invalid {key}: {message}")]
    Invalid { key: String, message: String },
}

impl ConfigError {
    fn invalid(section: &str, key: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            key: format!("{section}.{key}"),
            message: message.into(),
        }
    }
}

/// Target conversion for the `design` command.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DesignTargets {
    pub vin: Option<f64>,
    pub vout: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSettings {
    pub levels: Vec<f64>,
    pub points: usize,
    pub resolution: usize,
}

impl Default for CurveSettings {
    fn default() -> Self {
        Self {
            levels: vec![400.0, 700.0, 1000.0],
            points: 200,
            resolution: 100_000,
        }
    }
}

/// Everything a configuration file can set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Settings {
    pub scenario: Scenario,
    pub targets: DesignTargets,
    pub curve: CurveSettings,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("panel", &["isc_ref", "voc_ref", "g_ref", "a_ref", "temp_coeff_i", "temp_coeff_v", "t_ref", "temperature"]),
    ("converter", &["duty", "freq", "load_r", "inductance", "capacitance", "efficiency", "on_time", "period", "vin", "vout"]),
    ("mppt", &["step", "duty_min", "duty_max", "update_every", "initial_duty"]),
    ("battery", &["soc", "capacity", "v_nominal", "soc_low_cutoff", "max_charge_current"]),
    ("soil", &["theta", "volume", "theta_fc", "drain_coeff", "et_rate"]),
    ("sensor", &["v_supply", "v_dry", "v_wet", "adc_bits", "adc_vref", "knots", "noise_lsb"]),
    ("controller", &["setpoint", "hysteresis"]),
    ("pump", &["flow_rate", "electrical_power", "reservoir"]),
    ("profile", &["kind", "value", "levels", "end", "peak", "day_length"]),
    ("sim", &["dt", "duration", "seed"]),
    ("curve", &["levels", "points", "resolution"]),
];

/// Parses configuration text with no overrides.
pub fn parse_config(text: &str) -> Result<Settings, ConfigError> {
    load::<&str>(text, &[])
}

/// Parses configuration text, then applies `section.key=value` overrides.
pub fn load<S: AsRef<str>>(text: &str, overrides: &[S]) -> Result<Settings, ConfigError> {
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax {
        location: match e.span() {
            Some(span) => format!("line {}", text[..span.start].matches('\n').count() + 1),
            None => "unknown location".to_string(),
        },
        message: e.message().to_string(),
    })?;
    for o in overrides {
        apply_override(&mut table, o.as_ref())?;
    }
    build(&table)
}

fn apply_override(table: &mut Table, arg: &str) -> Result<(), ConfigError> {
    let syntax = |message: &str| ConfigError::Syntax {
        location: format!("--set {arg}"),
        message: message.to_string(),
    };
    let (path, raw) = arg.split_once('=').ok_or_else(|| syntax("expected section.key=value"))?;
    let (section, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| syntax("expected section.key=value"))?;
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| Value::Table(Table::new()));
    match entry {
        Value::Table(t) => {
            t.insert(key.to_string(), value);
            Ok(())
        }
        _ => Err(ConfigError::UnknownKey { key: section.to_string() }),
    }
}

/// Strict, typed view of one section.
struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
}

impl<'a> Section<'a> {
    fn raw(&self, key: &str) -> Option<&'a Value> {
        self.table.and_then(|t| t.get(key))
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        self.opt_f64(key).map(|v| v.unwrap_or(default))
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => as_f64(v)
                .map(Some)
                .ok_or_else(|| ConfigError::invalid(self.name, key, "expected a number")),
        }
    }

    fn uint(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(Value::Integer(i)) if *i >= 0 => Ok(*i as u64),
            Some(_) => Err(ConfigError::invalid(self.name, key, "expected a non-negative integer")),
        }
    }

    fn string(&self, key: &str, default: &str) -> Result<String, ConfigError> {
        match self.raw(key) {
            None => Ok(default.to_string()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(ConfigError::invalid(self.name, key, "expected a string")),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let bad = || ConfigError::invalid(self.name, key, "expected a list of numbers");
        let arr = v.as_array().ok_or_else(bad)?;
        arr.iter().map(|x| as_f64(x).ok_or_else(bad)).collect::<Result<_, _>>().map(Some)
    }

    fn pairs(&self, key: &str) -> Result<Option<Vec<(f64, f64)>>, ConfigError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let bad = || ConfigError::invalid(self.name, key, "expected a list of [number, number] pairs");
        let arr = v.as_array().ok_or_else(bad)?;
        arr.iter()
            .map(|pair| match pair.as_array().map(Vec::as_slice) {
                Some([a, b]) => Ok((as_f64(a).ok_or_else(bad)?, as_f64(b).ok_or_else(bad)?)),
                _ => Err(bad()),
            })
            .collect::<Result<_, _>>()
            .map(Some)
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn check_keys(table: &Table) -> Result<(), ConfigError> {
    for (name, value) in table {
        let Some((_, keys)) = SECTIONS.iter().find(|(s, _)| s == name) else {
            return Err(ConfigError::UnknownKey { key: name.clone() });
        };
        let Value::Table(inner) = value else {
            return Err(ConfigError::UnknownKey { key: name.clone() });
        };
        if let Some(k) = inner.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(ConfigError::UnknownKey { key: format!("{name}.{k}") });
        }
    }
    Ok(())
}

fn build(table: &Table) -> Result<Settings, ConfigError> {
    check_keys(table)?;
    let section = |name: &'static str| Section {
        name,
        table: table.get(name).and_then(Value::as_table),
    };
    let d = Settings::default();
    let mut s = d.scenario.clone();

    let panel = section("panel");
    s.panel.isc_ref = panel.f64("isc_ref", s.panel.isc_ref)?;
    s.panel.voc_ref = panel.f64("voc_ref", s.panel.voc_ref)?;
    s.panel.g_ref = panel.f64("g_ref", s.panel.g_ref)?;
    s.panel.a_ref = panel.f64("a_ref", s.panel.a_ref)?;
    s.panel.temp_coeff_i = panel.f64("temp_coeff_i", s.panel.temp_coeff_i)?;
    s.panel.temp_coeff_v = panel.f64("temp_coeff_v", s.panel.temp_coeff_v)?;
    s.panel.t_ref = panel.f64("t_ref", s.panel.t_ref)?;
    s.temperature = panel.f64("temperature", s.panel.t_ref)?;

    let conv = section("converter");
    let c = s.design;
    let mut design = ConverterDesign::new(
        conv.f64("duty", c.duty)?,
        conv.f64("freq", c.freq)?,
        conv.f64("load_r", c.load_r)?,
        conv.f64("inductance", c.inductance)?,
        conv.f64("capacitance", c.capacitance)?,
        conv.f64("efficiency", c.efficiency)?,
    );
    design.on_time = conv.f64("on_time", design.on_time)?;
    design.period = conv.f64("period", design.period)?;
    s.design = design;
    let targets = DesignTargets {
        vin: conv.opt_f64("vin")?,
        vout: conv.opt_f64("vout")?,
    };

    let mppt = section("mppt");
    s.mppt.step = mppt.f64("step", s.mppt.step)?;
    s.mppt.duty_min = mppt.f64("duty_min", s.mppt.duty_min)?;
    s.mppt.duty_max = mppt.f64("duty_max", s.mppt.duty_max)?;
    s.mppt.update_every = mppt.uint("update_every", s.mppt.update_every as u64)? as usize;
    s.mppt.initial_duty = mppt.opt_f64("initial_duty")?;

    let bat = section("battery");
    s.battery.soc = bat.f64("soc", s.battery.soc)?;
    s.battery.capacity = bat.f64("capacity", s.battery.capacity)?;
    s.battery.v_nominal = bat.f64("v_nominal", s.battery.v_nominal)?;
    s.battery.soc_low_cutoff = bat.f64("soc_low_cutoff", s.battery.soc_low_cutoff)?;
    s.battery.max_charge_current = bat.f64("max_charge_current", s.battery.max_charge_current)?;

    let soil = section("soil");
    s.soil.theta = soil.f64("theta", s.soil.theta)?;
    s.soil.volume = soil.f64("volume", s.soil.volume)?;
    s.soil.theta_fc = soil.f64("theta_fc", s.soil.theta_fc)?;
    s.soil.drain_coeff = soil.f64("drain_coeff", s.soil.drain_coeff)?;
    s.et_rate = soil.f64("et_rate", s.et_rate)?;

    let sensor = section("sensor");
    s.sensor.v_supply = sensor.f64("v_supply", s.sensor.v_supply)?;
    s.sensor.v_dry = sensor.f64("v_dry", s.sensor.v_dry)?;
    s.sensor.v_wet = sensor.f64("v_wet", s.sensor.v_wet)?;
    s.sensor.adc_bits = sensor
        .uint("adc_bits", s.sensor.adc_bits as u64)?
        .try_into()
        .map_err(|_| ConfigError::invalid("sensor", "adc_bits", "out of range"))?;
    s.sensor.adc_vref = sensor.f64("adc_vref", s.sensor.adc_vref)?;
    if let Some(knots) = sensor.pairs("knots")? {
        s.sensor.knots = knots;
    }
    s.adc_noise_lsb = sensor
        .uint("noise_lsb", 0)?
        .try_into()
        .map_err(|_| ConfigError::invalid("sensor", "noise_lsb", "out of range"))?;

    let ctl = section("controller");
    s.controller.setpoint = ctl.f64("setpoint", s.controller.setpoint)?;
    s.controller.hysteresis = ctl.f64("hysteresis", s.controller.hysteresis)?;

    let pump = section("pump");
    s.pump.flow_rate = pump.f64("flow_rate", s.pump.flow_rate)?;
    s.pump.electrical_power = pump.f64("electrical_power", s.pump.electrical_power)?;
    s.reservoir = pump.opt_f64("reservoir")?;

    let prof = section("profile");
    s.profile = match prof.string("kind", "diurnal")?.as_str() {
        "constant" => IrradianceProfile::Constant {
            value: prof.f64("value", 1000.0)?,
        },
        "three_level" => IrradianceProfile::ThreeLevel {
            levels: prof
                .pairs("levels")?
                .unwrap_or_else(|| vec![(0.0, 400.0), (100.0, 700.0), (200.0, 1000.0)]),
            end: Some(prof.f64("end", 300.0)?),
        },
        "diurnal" => IrradianceProfile::Diurnal {
            peak: prof.f64("peak", 1000.0)?,
            day_length: prof.f64("day_length", 86_400.0)?,
        },
        other => {
            return Err(ConfigError::invalid(
                "profile",
                "kind",
                format!("`{other}` is not one of constant, three_level, diurnal"),
            ))
        }
    };

    let sim = section("sim");
    s.dt = sim.f64("dt", s.dt)?;
    s.duration = sim.f64("duration", s.duration)?;
    s.seed = sim.uint("seed", s.seed)?;

    s.validate().map_err(|e| match e {
        Error::Section { section, source } => ConfigError::invalid(
            section,
            source.field().unwrap_or("?"),
            source.to_string(),
        ),
        other => ConfigError::Invalid {
            key: "scenario".into(),
            message: other.to_string(),
        },
    })?;

    let curve_sec = section("curve");
    let curve = CurveSettings {
        levels: curve_sec.list("levels")?.unwrap_or(d.curve.levels),
        points: curve_sec.uint("points", d.curve.points as u64)? as usize,
        resolution: curve_sec.uint("resolution", d.curve.resolution as u64)? as usize,
    };
    if curve.levels.is_empty() || curve.levels.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
        return Err(ConfigError::invalid("curve", "levels", "need one or more irradiance levels >= 0"));
    }
    if curve.points < 2 {
        return Err(ConfigError::invalid("curve", "points", "must be >= 2"));
    }
    if curve.resolution < 1000 {
        return Err(ConfigError::invalid("curve", "resolution", "must be >= 1000"));
    }

    Ok(Settings {
        scenario: s,
        targets,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), Settings::default());
        assert_eq!(parse_config("# nothing\n\n").unwrap(), Settings::default());
    }

    #[test]
    fn values_are_applied() {
        let text = "[converter]\nduty = 0.4\nfreq = 50000\n\n[profile]\nkind = \"constant\"\nvalue = 650\n\n[sim]\nduration = 10\n";
        let s = parse_config(text).unwrap();
        assert_eq!(s.scenario.design.duty, 0.4);
        assert_eq!(s.scenario.design.period, 1.0 / 50_000.0);
        assert_eq!(s.scenario.profile, IrradianceProfile::Constant { value: 650.0 });
        assert_eq!(s.scenario.duration, 10.0);
    }

    #[test]
    fn out_of_range_names_the_key() {
        let err = parse_config("[converter]\nduty = 1.5\n").unwrap_err();
        match err {
            ConfigError::Invalid { key, .. } => assert_eq!(key, "converter.duty"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn misspelled_key_is_rejected() {
        let err = parse_config("[controller]\nsetpoin = 50\n").unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey { key: "controller.setpoin".into() });
        let err = parse_config("[weather]\nrain = 1\n").unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey { key: "weather".into() });
        let err = parse_config("orphan = 1\n").unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey { key: "orphan".into() });
    }

    #[test]
    fn syntax_errors_carry_the_line() {
        let err = parse_config("[panel]\nisc_ref = 5\nvoc_ref = = 3\n").unwrap_err();
        match err {
            ConfigError::Syntax { location, .. } => assert_eq!(location, "line 3"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn wrong_type_is_invalid() {
        let err = parse_config("[battery]\nsoc = \"half\"\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref key, .. } if key == "battery.soc"));
    }

    #[test]
    fn overrides_apply_after_the_file() {
        let s = load("[controller]\nsetpoint = 40\n", &["controller.setpoint=45", "profile.kind=three_level"]).unwrap();
        assert_eq!(s.scenario.controller.setpoint, 45.0);
        assert!(matches!(s.scenario.profile, IrradianceProfile::ThreeLevel { .. }));
        let err = load("", &["controller.setpoin=45"]).unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey { key: "controller.setpoin".into() });
        let err = load("", &["setpoint=45"]).unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { .. }));
    }

    #[test]
    fn lists_and_pairs() {
        let text = "[curve]\nlevels = [100, 200.5]\n[profile]\nkind = \"three_level\"\nlevels = [[0, 300], [50, 600]]\nend = 80\n[sensor]\nknots = [[0.5, 2.0]]\n";
        let s = parse_config(text).unwrap();
        assert_eq!(s.curve.levels, vec![100.0, 200.5]);
        assert_eq!(
            s.scenario.profile,
            IrradianceProfile::ThreeLevel { levels: vec![(0.0, 300.0), (50.0, 600.0)], end: Some(80.0) }
        );
        assert_eq!(s.scenario.sensor.knots, vec![(0.5, 2.0)]);
        let err = parse_config("[profile]\nkind = \"three_level\"\nlevels = [[0, 300, 1]]\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref key, .. } if key == "profile.levels"));
    }

    #[test]
    fn unknown_profile_kind() {
        let err = parse_config("[profile]\nkind = \"storm\"\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref key, .. } if key == "profile.kind"));
    }
}
