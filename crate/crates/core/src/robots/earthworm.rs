//! Stick-slip locomotion of a two-legged crawler driven by one linear
//! actuator.
//!
//! Each leg rests on a convex foot whose two halves have different friction
//! coefficients; the actuator's elongation or contraction tilts the feet so
//! that one leg sits on its high-friction half and anchors while the other
//! slips. Motion is quasi-static: per cycle the actuator swings between the
//! stroke at `p_max` and at `p_min`, and the slipping leg advances by that
//! swing minus the compliance taken up before the slipping leg breaks loose.

use std::fmt::Write as _;

use super::{ordered_map, positive, LookupTable, RobotError};
use crate::pneumatics::{cycle_amplitude, PneumaticPlant};

/// Which leg sits on its high-friction half while the actuator elongates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LegSwitch {
    /// Back leg anchors on elongation, front leg on contraction.
    BackAnchorsOnElongation,
    /// Mirror image: front leg anchors on elongation.
    FrontAnchorsOnElongation,
}

impl LegSwitch {
    fn sign(self) -> f64 {
        match self {
            LegSwitch::BackAnchorsOnElongation => 1.0,
            LegSwitch::FrontAnchorsOnElongation => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            LegSwitch::BackAnchorsOnElongation => LegSwitch::FrontAnchorsOnElongation,
            LegSwitch::FrontAnchorsOnElongation => LegSwitch::BackAnchorsOnElongation,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EarthwormModel {
    /// Actuator elongation (mm) against chamber pressure (kPa).
    pub stroke_map: LookupTable,
    /// Friction coefficient of the foot half selected by `switch` as the
    /// anchoring one.
    pub mu_high: f64,
    pub mu_low: f64,
    /// Normal load per leg, N.
    pub leg_normal_load: f64,
    /// Axial stiffness of the actuator body, N/mm.
    pub actuator_stiffness: f64,
    pub switch: LegSwitch,
    /// Fraction of each cycle spent filling.
    pub duty: f64,
}

impl EarthwormModel {
    pub fn validate(&self) -> Result<(), RobotError> {
        positive("mu_high", self.mu_high)?;
        positive("mu_low", self.mu_low)?;
        positive("leg_normal_load", self.leg_normal_load)?;
        positive("actuator_stiffness", self.actuator_stiffness)?;
        if !(self.duty > 0.0 && self.duty < 1.0) {
            return Err(RobotError::InvalidParameter(format!("duty must be in (0, 1), got {}", self.duty)));
        }
        Ok(())
    }

    /// Stroke absorbed per half-cycle before the slipping leg moves, mm:
    /// the actuator must build up the slipping leg's friction force.
    pub fn threshold_stroke(&self) -> f64 {
        self.mu_high.min(self.mu_low) * self.leg_normal_load / self.actuator_stiffness
    }

    /// Feet turned around: the friction halves swap roles.
    pub fn mirrored(&self) -> Self {
        EarthwormModel {
            mu_high: self.mu_low,
            mu_low: self.mu_high,
            ..self.clone()
        }
    }
}

/// Net forward displacement per actuation cycle, mm. Negative values mean
/// the crawler moves backwards.
pub fn earthworm_cycle(
    model: &EarthwormModel,
    plant: &PneumaticPlant,
    frequency: f64,
    supply: f64,
) -> Result<f64, RobotError> {
    model.validate()?;
    let (p_max, p_min) = cycle_amplitude(plant, frequency, model.duty, supply)?;
    if model.mu_high == model.mu_low {
        // Both legs slip alike; nothing breaks the symmetry.
        return Ok(0.0);
    }
    let stroke = model.stroke_map.eval(p_max) - model.stroke_map.eval(p_min);
    let travel = (stroke - 2.0 * model.threshold_stroke()).max(0.0);
    let direction = (model.mu_high - model.mu_low).signum() * model.switch.sign();
    Ok(direction * travel)
}

/// Locomotion speed `f × displacement per cycle` at each frequency, mm/s.
pub fn earthworm_speed_sweep(
    model: &EarthwormModel,
    plant: &PneumaticPlant,
    frequencies: &[f64],
    supply: f64,
) -> Result<Vec<(f64, f64)>, RobotError> {
    ordered_map(frequencies, |f| earthworm_cycle(model, plant, f, supply).map(|d| (f, f * d)))
        .into_iter()
        .collect()
}

/// First sweep point with the highest speed.
pub fn speed_peak(sweep: &[(f64, f64)]) -> Option<(f64, f64)> {
    sweep
        .iter()
        .copied()
        .fold(None, |best, p| match best {
            Some(b) if b.1 >= p.1 => Some(b),
            _ => Some(p),
        })
}

pub fn speed_sweep_csv(sweep: &[(f64, f64)]) -> String {
    let mut out = String::from("freq_Hz,speed_mm_s\n");
    for (f, v) in sweep {
        let _ = writeln!(out, "{f:.4},{v:.6}");
    }
    out
}
