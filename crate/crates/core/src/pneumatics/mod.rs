//! Chamber fill/vent dynamics behind two on/off valves, the sampled
//! pressure controller and the heated-bath thermostat.

pub mod bath;
pub mod controller;

use thiserror::Error;

pub use bath::{bath_csv, run_bath, steady_duty, BathPlant, BathSample, MAX_BATH_TEMPERATURE};
pub use controller::{run_controller, trace_csv, ControlMode, OnOffController, SensorNoise, TraceSample};

/// Default fill time constant, s.
pub const DEFAULT_TAU_FILL: f64 = 0.20;
/// Default vent time constant, s.
pub const DEFAULT_TAU_VENT: f64 = 0.35;

#[derive(Debug, Error, PartialEq)]
pub enum PneumaticError {
    #[error("inlet and vent valves commanded open together")]
    Interlock,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

fn positive(name: &str, v: f64) -> Result<(), PneumaticError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(PneumaticError::InvalidParameter(format!("{name} must be > 0, got {v}")))
    }
}

/// One actuator chamber with an inlet valve to the supply and a vent valve
/// to atmosphere. Pressures are gauge, kPa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PneumaticPlant {
    pub supply_pressure: f64,
    pub chamber_pressure: f64,
    pub tau_fill: f64,
    pub tau_vent: f64,
    pub inlet_open: bool,
    pub vent_open: bool,
}

impl PneumaticPlant {
    pub fn new(supply_pressure: f64, tau_fill: f64, tau_vent: f64) -> Result<Self, PneumaticError> {
        let plant = PneumaticPlant {
            supply_pressure,
            chamber_pressure: 0.0,
            tau_fill,
            tau_vent,
            inlet_open: false,
            vent_open: false,
        };
        plant.validate()?;
        Ok(plant)
    }

    pub fn validate(&self) -> Result<(), PneumaticError> {
        positive("tau_fill", self.tau_fill)?;
        positive("tau_vent", self.tau_vent)?;
        if !(self.supply_pressure >= 0.0 && self.supply_pressure.is_finite()) {
            return Err(PneumaticError::InvalidParameter(format!(
                "supply pressure must be >= 0, got {}",
                self.supply_pressure
            )));
        }
        if !(0.0..=self.supply_pressure).contains(&self.chamber_pressure) {
            return Err(PneumaticError::InvalidParameter(format!(
                "chamber pressure {} outside [0, {}]",
                self.chamber_pressure, self.supply_pressure
            )));
        }
        if self.inlet_open && self.vent_open {
            return Err(PneumaticError::Interlock);
        }
        Ok(())
    }

    /// Commands both valves; opening both is refused.
    pub fn set_valves(&mut self, inlet: bool, vent: bool) -> Result<(), PneumaticError> {
        if inlet && vent {
            return Err(PneumaticError::Interlock);
        }
        self.inlet_open = inlet;
        self.vent_open = vent;
        Ok(())
    }
}

impl Default for PneumaticPlant {
    fn default() -> Self {
        PneumaticPlant {
            supply_pressure: 40.0,
            chamber_pressure: 0.0,
            tau_fill: DEFAULT_TAU_FILL,
            tau_vent: DEFAULT_TAU_VENT,
            inlet_open: false,
            vent_open: false,
        }
    }
}

/// Advances the chamber pressure by `dt` seconds with the exact solution of
/// the first-order lag for the current valve state.
pub fn step_plant(plant: &PneumaticPlant, dt: f64) -> Result<PneumaticPlant, PneumaticError> {
    positive("dt", dt)?;
    if plant.inlet_open && plant.vent_open {
        return Err(PneumaticError::Interlock);
    }
    let mut next = *plant;
    let p = plant.chamber_pressure;
    if plant.inlet_open {
        let s = plant.supply_pressure;
        next.chamber_pressure = p + (s - p) * -(-dt / plant.tau_fill).exp_m1();
    } else if plant.vent_open {
        next.chamber_pressure = p * (-dt / plant.tau_vent).exp();
    }
    next.chamber_pressure = next.chamber_pressure.clamp(0.0, plant.supply_pressure.max(p));
    Ok(next)
}

/// Periodic steady state `(p_max, p_min)` of a chamber alternately filled
/// for `duty / f` seconds and vented for `(1 − duty) / f` seconds.
pub fn cycle_amplitude(
    plant: &PneumaticPlant,
    frequency: f64,
    duty: f64,
    supply: f64,
) -> Result<(f64, f64), PneumaticError> {
    positive("frequency", frequency)?;
    positive("tau_fill", plant.tau_fill)?;
    positive("tau_vent", plant.tau_vent)?;
    if !(duty > 0.0 && duty < 1.0) {
        return Err(PneumaticError::InvalidParameter(format!("duty must be in (0, 1), got {duty}")));
    }
    let period = 1.0 / frequency;
    let a = (-duty * period / plant.tau_fill).exp();
    let b = (-(1.0 - duty) * period / plant.tau_vent).exp();
    // 1 − a, computed without cancellation at high frequency
    let fill = -(-duty * period / plant.tau_fill).exp_m1();
    let p_max = supply * fill / (1.0 - a * b);
    Ok((p_max, p_max * b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_time_constant_reaches_63_percent() {
        let mut p = PneumaticPlant::new(100.0, 0.2, 0.35).unwrap();
        p.set_valves(true, false).unwrap();
        let next = step_plant(&p, 0.2).unwrap();
        assert!((next.chamber_pressure - 100.0 * (1.0 - (-1.0f64).exp())).abs() < 1e-9);
        assert!((next.chamber_pressure - 63.212).abs() < 1e-3);
    }

    #[test]
    fn venting_for_ten_time_constants_empties_the_chamber() {
        let mut p = PneumaticPlant::new(40.0, 0.2, 0.35).unwrap();
        p.chamber_pressure = 40.0;
        p.set_valves(false, true).unwrap();
        let next = step_plant(&p, 3.5).unwrap();
        assert!(next.chamber_pressure < 0.005);
    }

    #[test]
    fn closed_valves_hold_pressure() {
        let mut p = PneumaticPlant::new(40.0, 0.2, 0.35).unwrap();
        p.chamber_pressure = 17.5;
        assert_eq!(step_plant(&p, 1.0).unwrap().chamber_pressure, 17.5);
    }

    #[test]
    fn interlock_is_enforced() {
        let mut p = PneumaticPlant::default();
        assert_eq!(p.set_valves(true, true), Err(PneumaticError::Interlock));
        p.inlet_open = true;
        p.vent_open = true;
        assert_eq!(step_plant(&p, 0.1), Err(PneumaticError::Interlock));
    }

    #[test]
    fn low_frequency_swing_is_full() {
        let p = PneumaticPlant::default();
        let (hi, lo) = cycle_amplitude(&p, 0.01, 0.5, 40.0).unwrap();
        assert!(hi > 40.0 * (1.0 - 1e-9));
        assert!(lo < 1e-9);
    }
}
