//! Run configuration: TOML file layered over a named preset.

use fotune_core::{ClosedLoopTarget, PidGains, Plant, ScenarioSpec};
use serde::Deserialize;
use toml::{Table, Value};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub plant: Option<PlantSection>,
    pub target: Option<TargetSection>,
    #[serde(default)]
    pub tune: TuneSection,
    #[serde(default)]
    pub mcurve: McurveSection,
    pub gains: Option<GainsSection>,
    pub compare: Option<GainsSection>,
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSection {
    pub gain: Option<f64>,
    pub zeta: Option<f64>,
    pub omega_n: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    pub zeta: Option<f64>,
    pub omega_n: Option<f64>,
    pub m: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuneSection {
    pub desired_zeta: Option<f64>,
    pub q_step: Option<f64>,
    pub r: Option<f64>,
    pub refine: Option<bool>,
    pub achieved_sig_digits: Option<u32>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McurveSection {
    pub q_from: Option<f64>,
    pub q_to: Option<f64>,
    pub q_step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsSection {
    pub kp: Option<f64>,
    pub ki: Option<f64>,
    pub kd: Option<f64>,
}

fn require(section: &str, key: &str, value: Option<f64>) -> Result<f64, ConfigError> {
    value.ok_or_else(|| ConfigError(format!("[{section}] is missing `{key}`")))
}

impl GainsSection {
    pub fn resolve(&self, section: &str) -> Result<PidGains, ConfigError> {
        Ok(PidGains::new(
            require(section, "kp", self.kp)?,
            require(section, "ki", self.ki)?,
            require(section, "kd", self.kd)?,
        ))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub step: Option<f64>,
    pub disturbance: Option<f64>,
    pub disturbance_time: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub const PRESETS: [&str; 4] = ["p1", "p2", "p3", "wang-oscillatory"];

pub fn preset(name: &str) -> Option<&'static str> {
    let text = match name {
        "p1" => {
            "[plant]\ngain = 9.0\nzeta = 0.2\nomega_n = 3.0\n\
             [target]\nzeta = 0.75\nomega_n = 7.0\nm = 10.0\n\
             [tune]\ndesired_zeta = 0.93\nachieved_sig_digits = 3\n"
        }
        "p2" => {
            "[plant]\ngain = 25.0\nzeta = 1.0\nomega_n = 5.0\n\
             [target]\nzeta = 0.75\nomega_n = 10.0\nm = 10.0\n\
             [tune]\ndesired_zeta = 0.92\nachieved_sig_digits = 3\n"
        }
        "p3" => {
            "[plant]\ngain = 1.0\nzeta = 5.0\nomega_n = 1.0\n\
             [target]\nzeta = 0.75\nomega_n = 5.0\nm = 10.0\n\
             [tune]\ndesired_zeta = 0.91\nachieved_sig_digits = 3\n"
        }
        "wang-oscillatory" => {
            "[plant]\ngain = 1.0\nzeta = 0.2\nomega_n = 0.1\n\
             [target]\nzeta = 0.98\nomega_n = 2.0\nm = 10.0\n"
        }
        _ => return None,
    };
    Some(text)
}

fn merge(base: &mut Table, over: Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

/// Parse `file_text` (if any) over the preset `preset_name` (if any).
/// Errors from the file carry its line and column.
pub fn load(preset_name: Option<&str>, file: Option<(&str, &str)>) -> Result<RunConfig, ConfigError> {
    let mut table = match preset_name {
        Some(name) => {
            let text = preset(name).ok_or_else(|| {
                ConfigError(format!("unknown preset '{name}' (expected one of {})", PRESETS.join(", ")))
            })?;
            text.parse::<Table>().expect("presets are valid TOML")
        }
        None => Table::new(),
    };
    if let Some((path, text)) = file {
        toml::from_str::<RunConfig>(text).map_err(|e| ConfigError(format!("{path}: {e}")))?;
        let over: Table = text.parse().map_err(|e| ConfigError(format!("{path}: {e}")))?;
        merge(&mut table, over);
    }
    Value::Table(table).try_into().map_err(|e| ConfigError(format!("configuration: {e}")))
}

impl RunConfig {
    pub fn plant(&self) -> Result<Plant, ConfigError> {
        let p = self.plant.ok_or_else(|| ConfigError("missing [plant] section (use --preset or --config)".into()))?;
        Plant::new(require("plant", "gain", p.gain)?, require("plant", "zeta", p.zeta)?, require("plant", "omega_n", p.omega_n)?)
            .map_err(|e| ConfigError(format!("[plant]: {e}")))
    }

    pub fn target(&self) -> Result<ClosedLoopTarget, ConfigError> {
        let t = self.target.ok_or_else(|| ConfigError("missing [target] section".into()))?;
        let m = t.m.unwrap_or(fotune_core::pole_placement::DEFAULT_DOMINANCE);
        ClosedLoopTarget::new(require("target", "zeta", t.zeta)?, require("target", "omega_n", t.omega_n)?, m)
            .map_err(|e| ConfigError(format!("[target]: {e}")))
    }

    /// Scenario from the `[scenario]` section, falling back to a unit step
    /// with a half-amplitude load disturbance at 60% of the horizon.
    pub fn scenario(&self, default_t_end: f64, default_dt: f64) -> ScenarioSpec {
        let s = &self.scenario;
        let t_end = s.t_end.unwrap_or(default_t_end);
        let step = s.step.unwrap_or(1.0);
        ScenarioSpec {
            t_end,
            dt: s.dt.unwrap_or(default_dt),
            step_amplitude: step,
            disturbance_amplitude: s.disturbance.unwrap_or(0.5 * step),
            disturbance_time: s.disturbance_time.unwrap_or(0.6 * t_end),
        }
    }
}
