//! Layered run configuration in a flat `section.key = value` text format.
//!
//! Layers, lowest first: built-in defaults, the shipped calibration file,
//! an optional user file (from the command line or `PNEUSOFT_CONFIG`), then
//! individual `key=value` overrides. Unknown keys are rejected at every
//! layer.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::fea::NewtonSettings;
use crate::material::{CalibrationBounds, HyperelasticParams};
use crate::pneumatics::{BathPlant, PneumaticPlant};
use crate::robots::{
    EarthwormModel, GripperModel, LegSwitch, LookupTable, QuadrupedModel, RobotError, Tape,
};

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "PNEUSOFT_CONFIG";

/// Calibrated constants, applied on top of the defaults.
pub const CALIBRATION: &str = include_str!("../fixtures/calibration.cfg");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{origin}:{line}: {message}")]
    Syntax { origin: String, line: usize, message: String },
    #[error("unknown config key '{0}'")]
    UnknownKey(String),
    #[error("config key '{key}': {message}")]
    BadValue { key: String, message: String },
    #[error("cannot read config file {path}: {message}")]
    Io { path: String, message: String },
}

/// `(key, default)` for every recognised key.
const KEYS: &[(&str, &str)] = &[
    ("material.c10", "0.24"),
    ("material.kappa_ratio", "1000"),
    ("mesh.element_size", "1.0"),
    ("mesh.axial_aspect", "1.0"),
    ("fea.increments", "300"),
    ("fea.rel_tol", "1e-8"),
    ("fea.abs_tol", "1e-10"),
    ("fea.max_iterations", "30"),
    ("fea.max_bisections", "5"),
    ("pneumatics.tau_fill_s", "0.20"),
    ("pneumatics.tau_vent_s", "0.35"),
    ("pneumatics.supply_kPa", "40"),
    ("pneumatics.sample_rate_Hz", "50"),
    ("pneumatics.duty", "0.5"),
    ("bath.capacity_J_per_C", "33906.6"),
    ("bath.heater_power_W", "2000"),
    ("bath.loss_W_per_C", "10"),
    ("bath.ambient_C", "22"),
    ("bath.initial_C", "22"),
    ("bath.setpoint_C", "65"),
    ("bath.hysteresis_C", "1"),
    ("bath.dt_s", "1"),
    ("robots.earthworm.stroke_table", "0:0"),
    ("robots.earthworm.mu_high", "0.8"),
    ("robots.earthworm.mu_low", "0.3"),
    ("robots.earthworm.leg_normal_load_N", "0.5"),
    ("robots.earthworm.actuator_stiffness_N_per_mm", "1"),
    ("robots.earthworm.switch", "back"),
    ("robots.quad.cycle_period_s", "0.9"),
    ("robots.quad.leg_length_mm", "60"),
    ("robots.quad.bend_table", "0:0"),
    ("robots.quad.stall_mass_g", "1000"),
    ("robots.gripper.finger_count", "3"),
    ("robots.gripper.contact_points", "40:4, 80:1"),
    ("robots.gripper.normal_gain_N_per_kPa", "0.05"),
    ("robots.gripper.saturation_kPa", "40"),
    ("robots.gripper.mu_plain", "0.3"),
    ("robots.gripper.mu_tape", "1.0"),
    ("robots.gripper.adhesion_N", "0"),
    ("robots.gripper.mass_g", "54"),
    ("robots.gripper.pressure_cap_kPa", "100"),
    ("robots.gripper.reference_diameter_mm", "70"),
    ("calibration.c10_lower", "0.01"),
    ("calibration.c10_upper", "2.0"),
    ("calibration.bracket_tol", "1e-3"),
    ("calibration.increments", "30"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    values: BTreeMap<&'static str, String>,
}

impl Default for Config {
    /// Built-in defaults with the calibration layer applied.
    fn default() -> Self {
        let mut c = Config::bare();
        c.apply_text(CALIBRATION, "calibration.cfg")
            .expect("shipped calibration file is valid");
        c
    }
}

impl Config {
    /// Built-in defaults only, without the calibration layer.
    pub fn bare() -> Self {
        Config {
            values: KEYS.iter().map(|&(k, v)| (k, v.to_string())).collect(),
        }
    }

    /// Defaults, calibration, then the file named by `path` or, if `None`,
    /// by `PNEUSOFT_CONFIG` when set.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut c = Config::default();
        let env = std::env::var_os(CONFIG_ENV);
        let file = path.map(Path::to_path_buf).or_else(|| env.map(Into::into));
        if let Some(p) = file {
            let text = std::fs::read_to_string(&p).map_err(|e| ConfigError::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })?;
            c.apply_text(&text, &p.display().to_string())?;
        }
        Ok(c)
    }

    /// Applies a document layer. `source` names it in error messages.
    pub fn apply_text(&mut self, text: &str, source: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                origin: source.to_string(),
                line: i + 1,
                message: format!("expected 'section.key = value', got '{line}'"),
            })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// Applies one `key=value` override.
    pub fn apply_override(&mut self, item: &str) -> Result<(), ConfigError> {
        let (k, v) = item.split_once('=').ok_or_else(|| ConfigError::Syntax {
            origin: "--set".into(),
            line: 1,
            message: format!("expected key=value, got '{item}'"),
        })?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let slot = KEYS
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(k, _)| *k)
            .ok_or_else(|| ConfigError::UnknownKey(key.to_string()))?;
        self.values.insert(slot, value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Result<&str, ConfigError> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| ConfigError::UnknownKey(key.to_string()))
    }

    pub fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        let v = self.get(key)?;
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| bad(key, format!("expected a finite number, got '{v}'")))
    }

    pub fn usize(&self, key: &str) -> Result<usize, ConfigError> {
        let v = self.get(key)?;
        v.parse::<usize>()
            .map_err(|_| bad(key, format!("expected a non-negative integer, got '{v}'")))
    }

    pub fn table(&self, key: &str) -> Result<LookupTable, ConfigError> {
        LookupTable::parse(self.get(key)?).map_err(|e| bad(key, e.to_string()))
    }

    /// Fully resolved document, one `key = value` per line in key order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn material(&self) -> Result<HyperelasticParams, ConfigError> {
        Ok(HyperelasticParams::with_kappa_ratio(
            self.f64("material.c10")?,
            self.f64("material.kappa_ratio")?,
        ))
    }

    pub fn newton(&self) -> Result<NewtonSettings, ConfigError> {
        Ok(NewtonSettings {
            rel_tol: self.f64("fea.rel_tol")?,
            abs_tol: self.f64("fea.abs_tol")?,
            max_iterations: self.usize("fea.max_iterations")?,
            max_bisections: self.usize("fea.max_bisections")? as u32,
            ..NewtonSettings::default()
        })
    }

    pub fn calibration_bounds(&self) -> Result<CalibrationBounds, ConfigError> {
        Ok(CalibrationBounds {
            lower: self.f64("calibration.c10_lower")?,
            upper: self.f64("calibration.c10_upper")?,
            bracket_tol: self.f64("calibration.bracket_tol")?,
        })
    }

    pub fn plant(&self) -> Result<PneumaticPlant, ConfigError> {
        let plant = PneumaticPlant::new(
            self.f64("pneumatics.supply_kPa")?,
            self.f64("pneumatics.tau_fill_s")?,
            self.f64("pneumatics.tau_vent_s")?,
        )
        .map_err(|e| bad("pneumatics", e.to_string()))?;
        Ok(plant)
    }

    pub fn bath(&self) -> Result<BathPlant, ConfigError> {
        Ok(BathPlant {
            temperature: self.f64("bath.initial_C")?,
            heater_power: self.f64("bath.heater_power_W")?,
            thermal_capacity: self.f64("bath.capacity_J_per_C")?,
            loss_coefficient: self.f64("bath.loss_W_per_C")?,
            ambient: self.f64("bath.ambient_C")?,
            heater_on: false,
        })
    }

    pub fn earthworm(&self) -> Result<EarthwormModel, ConfigError> {
        let switch = match self.get("robots.earthworm.switch")? {
            "back" => LegSwitch::BackAnchorsOnElongation,
            "front" => LegSwitch::FrontAnchorsOnElongation,
            other => {
                return Err(bad(
                    "robots.earthworm.switch",
                    format!("expected 'back' or 'front', got '{other}'"),
                ))
            }
        };
        let model = EarthwormModel {
            stroke_map: self.table("robots.earthworm.stroke_table")?,
            mu_high: self.f64("robots.earthworm.mu_high")?,
            mu_low: self.f64("robots.earthworm.mu_low")?,
            leg_normal_load: self.f64("robots.earthworm.leg_normal_load_N")?,
            actuator_stiffness: self.f64("robots.earthworm.actuator_stiffness_N_per_mm")?,
            switch,
            duty: self.f64("pneumatics.duty")?,
        };
        model.validate().map_err(|e| robot("robots.earthworm", e))?;
        Ok(model)
    }

    pub fn quadruped(&self) -> Result<QuadrupedModel, ConfigError> {
        let model = QuadrupedModel {
            cycle_period: self.f64("robots.quad.cycle_period_s")?,
            phases: QuadrupedModel::antisymmetric_gait(),
            bend_map: self.table("robots.quad.bend_table")?,
            leg_length: self.f64("robots.quad.leg_length_mm")?,
            stall_mass: self.f64("robots.quad.stall_mass_g")?,
        };
        model.validate().map_err(|e| robot("robots.quad", e))?;
        Ok(model)
    }

    pub fn gripper(&self) -> Result<GripperModel, ConfigError> {
        let key = "robots.gripper.contact_points";
        let pts: Vec<(f64, f64)> = self
            .get(key)?
            .split(',')
            .map(|item| {
                let (d, p) = item.split_once(':')?;
                Some((d.trim().parse().ok()?, p.trim().parse().ok()?))
            })
            .collect::<Option<_>>()
            .ok_or_else(|| bad(key, "expected 'diameter:pressure, diameter:pressure'".into()))?;
        let [a, b] = pts[..] else {
            return Err(bad(key, format!("expected two points, got {}", pts.len())));
        };
        let model = GripperModel {
            finger_count: self.usize("robots.gripper.finger_count")?,
            contact_points: [a, b],
            normal_gain: self.f64("robots.gripper.normal_gain_N_per_kPa")?,
            saturation_pressure: self.f64("robots.gripper.saturation_kPa")?,
            mu_plain: self.f64("robots.gripper.mu_plain")?,
            tape: Tape {
                enabled: false,
                mu: self.f64("robots.gripper.mu_tape")?,
                adhesion: self.f64("robots.gripper.adhesion_N")?,
            },
            gripper_mass: self.f64("robots.gripper.mass_g")?,
            pressure_cap: self.f64("robots.gripper.pressure_cap_kPa")?,
            reference_diameter: self.f64("robots.gripper.reference_diameter_mm")?,
        };
        model.validate().map_err(|e| robot("robots.gripper", e))?;
        Ok(model)
    }
}

fn bad(key: &str, message: String) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        message,
    }
}

fn robot(key: &str, e: RobotError) -> ConfigError {
    bad(key, e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let mut c = Config::default();
        assert!(matches!(c.set("material.c11", "1"), Err(ConfigError::UnknownKey(_))));
        let err = c.apply_text("# header\nfea.increments = 10\nfoo\n", "test.cfg").unwrap_err();
        assert!(err.to_string().starts_with("test.cfg:3:"));
    }

    #[test]
    fn layers_override_in_order() {
        let mut c = Config::default();
        c.apply_text("material.c10 = 0.3  # softer batch", "file").unwrap();
        assert_eq!(c.f64("material.c10").unwrap(), 0.3);
        c.apply_override("material.c10=0.2").unwrap();
        assert_eq!(c.material().unwrap().c10, 0.2);
    }

    #[test]
    fn resolved_text_round_trips() {
        let c = Config::default();
        let mut d = Config::bare();
        d.apply_text(&c.to_text(), "resolved").unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn shipped_models_build() {
        let c = Config::default();
        c.earthworm().unwrap();
        c.quadruped().unwrap();
        c.gripper().unwrap();
        c.plant().unwrap();
        c.bath().unwrap().validate().unwrap();
        c.material().unwrap().validate().unwrap();
    }
}
