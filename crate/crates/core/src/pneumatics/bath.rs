//! Heated water bath under bang-bang thermostat control.

use std::fmt::Write as _;

use log::warn;

use super::{positive, PneumaticError};

/// Pump rating; the bath must stay below it.
pub const MAX_BATH_TEMPERATURE: f64 = 70.0;

/// Lumped thermal model `C dT/dt = P·heater − L (T − T_ambient)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathPlant {
    /// °C
    pub temperature: f64,
    /// W
    pub heater_power: f64,
    /// J/°C
    pub thermal_capacity: f64,
    /// W/°C
    pub loss_coefficient: f64,
    /// °C
    pub ambient: f64,
    pub heater_on: bool,
}

impl Default for BathPlant {
    fn default() -> Self {
        // 8.1 L of water
        BathPlant {
            temperature: 22.0,
            heater_power: 2000.0,
            thermal_capacity: 8.1 * 4186.0,
            loss_coefficient: 10.0,
            ambient: 22.0,
            heater_on: false,
        }
    }
}

impl BathPlant {
    pub fn validate(&self) -> Result<(), PneumaticError> {
        positive("thermal_capacity", self.thermal_capacity)?;
        positive("loss_coefficient", self.loss_coefficient)?;
        if !(self.heater_power >= 0.0) {
            return Err(PneumaticError::InvalidParameter(format!(
                "heater power must be >= 0, got {}",
                self.heater_power
            )));
        }
        if self.temperature < self.ambient {
            warn!(
                "bath starts at {} °C, below ambient {} °C; the model assumes T >= ambient",
                self.temperature, self.ambient
            );
        }
        Ok(())
    }

    /// Temperature the bath tends to with the heater in its current state.
    pub fn equilibrium(&self) -> f64 {
        let p = if self.heater_on { self.heater_power } else { 0.0 };
        self.ambient + p / self.loss_coefficient
    }

    /// Exact update over `dt` seconds.
    pub fn step(&self, dt: f64) -> BathPlant {
        let mut next = *self;
        let eq = self.equilibrium();
        next.temperature = eq + (self.temperature - eq) * (-dt * self.loss_coefficient / self.thermal_capacity).exp();
        next
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSample {
    pub time: f64,
    pub temperature: f64,
    pub heater: bool,
}

/// Thermostat run. The heater switches on below `setpoint − hysteresis`, off
/// above `setpoint + hysteresis`, and otherwise keeps its state.
pub fn run_bath(
    bath: &BathPlant,
    setpoint: f64,
    hysteresis: f64,
    duration: f64,
    dt: f64,
) -> Result<Vec<BathSample>, PneumaticError> {
    bath.validate()?;
    positive("duration", duration)?;
    positive("dt", dt)?;
    if !(hysteresis >= 0.0) {
        return Err(PneumaticError::InvalidParameter(format!(
            "hysteresis must be >= 0, got {hysteresis}"
        )));
    }
    if setpoint + hysteresis >= MAX_BATH_TEMPERATURE {
        return Err(PneumaticError::InvalidParameter(format!(
            "setpoint + hysteresis = {} must stay below {MAX_BATH_TEMPERATURE} °C",
            setpoint + hysteresis
        )));
    }
    let reachable = bath.ambient + bath.heater_power / bath.loss_coefficient;
    if reachable <= setpoint + hysteresis {
        warn!("heater cannot reach {} °C (equilibrium with heater on: {reachable:.2} °C)", setpoint + hysteresis);
    }
    let steps = (duration / dt + 1e-9).floor() as usize;
    let mut state = *bath;
    let mut trace = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        if state.temperature < setpoint - hysteresis {
            state.heater_on = true;
        } else if state.temperature > setpoint + hysteresis {
            state.heater_on = false;
        }
        trace.push(BathSample {
            time: k as f64 * dt,
            temperature: state.temperature,
            heater: state.heater_on,
        });
        if k < steps {
            state = state.step(dt);
        }
    }
    Ok(trace)
}

/// Fraction of samples with the heater on, over samples at or after `from`.
pub fn steady_duty(trace: &[BathSample], from: f64) -> f64 {
    let tail: Vec<&BathSample> = trace.iter().filter(|s| s.time >= from).collect();
    if tail.is_empty() {
        return 0.0;
    }
    tail.iter().filter(|s| s.heater).count() as f64 / tail.len() as f64
}

pub fn bath_csv(trace: &[BathSample]) -> String {
    let mut out = String::from("time_s,temp_C,heater\n");
    for s in trace {
        let _ = writeln!(out, "{:.3},{:.6},{}", s.time, s.temperature, u8::from(s.heater));
    }
    out
}
