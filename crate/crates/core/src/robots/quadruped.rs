//! Quadruped walking with diagonal leg pairs actuated in alternation.
//!
//! Each bending leg swings its tip through the actuator's bend angle; a rigid
//! leg of length `L` whose root rotates by `Δβ` moves its tip along a chord
//! of `2·L·sin(Δβ/2)`, which is taken as the step length. The body advances
//! one step per gait phase, scaled by a load derating.

use std::fmt::Write as _;

use log::warn;

use super::{ordered_map, positive, LookupTable, RobotError};
use crate::pneumatics::controller::DEFAULT_SAMPLE_RATE;

/// Pressure above which the legs are operated outside their tested range, kPa.
pub const QUAD_PRESSURE_LIMIT: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Leg {
    FrontLeft,
    FrontRight,
    BackLeft,
    BackRight,
}

/// A slice `[start, end)` of the gait cycle, as fractions of the period,
/// during which `legs` are pressurised.
#[derive(Debug, Clone, PartialEq)]
pub struct GaitPhase {
    pub legs: Vec<Leg>,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadrupedModel {
    /// Duration of one complete gait cycle, s.
    pub cycle_period: f64,
    pub phases: Vec<GaitPhase>,
    /// Leg bend angle (degrees) against pressure (kPa).
    pub bend_map: LookupTable,
    /// Rigid-leg length used for the chord step model, mm.
    pub leg_length: f64,
    /// Added mass at which the robot stops advancing, g.
    pub stall_mass: f64,
}

impl QuadrupedModel {
    /// Antisymmetric gait: front-left with back-right, then front-right with
    /// back-left, each for half of the cycle.
    pub fn antisymmetric_gait() -> Vec<GaitPhase> {
        vec![
            GaitPhase {
                legs: vec![Leg::FrontLeft, Leg::BackRight],
                start: 0.0,
                end: 0.5,
            },
            GaitPhase {
                legs: vec![Leg::FrontRight, Leg::BackLeft],
                start: 0.5,
                end: 1.0,
            },
        ]
    }

    pub fn validate(&self) -> Result<(), RobotError> {
        positive("cycle_period", self.cycle_period)?;
        positive("leg_length", self.leg_length)?;
        positive("stall_mass", self.stall_mass)?;
        let bad = |m: &str| Err(RobotError::InvalidParameter(m.to_string()));
        if self.phases.is_empty() {
            return bad("the gait needs at least one phase");
        }
        let mut t = 0.0;
        for ph in &self.phases {
            if ph.start != t || !(ph.end > ph.start) {
                return bad("gait phases must tile [0, 1] in order without gaps or overlaps");
            }
            if ph.legs.is_empty() {
                return bad("every gait phase must actuate at least one leg");
            }
            t = ph.end;
        }
        if t != 1.0 {
            return bad("gait phases must end at 1");
        }
        Ok(())
    }

    /// Step length at `pressure`, mm.
    pub fn step_length(&self, pressure: f64) -> f64 {
        step_length_from_bend(self.bend_map.eval(pressure), self.leg_length)
    }

    /// Step-length multiplier for an added mass, in `[0, 1]`.
    pub fn load_derating(&self, added_mass: f64) -> f64 {
        (1.0 - added_mass / self.stall_mass).clamp(0.0, 1.0)
    }

    /// Body advance per gait cycle, mm.
    pub fn advance_per_cycle(&self, pressure: f64, added_mass: f64) -> f64 {
        self.phases.len() as f64 * self.step_length(pressure) * self.load_derating(added_mass)
    }

    pub fn speed(&self, pressure: f64, added_mass: f64) -> f64 {
        self.advance_per_cycle(pressure, added_mass) / self.cycle_period
    }
}

/// Chord swept by the tip of a rigid leg whose root rotates by `angle_deg`.
pub fn step_length_from_bend(angle_deg: f64, leg_length: f64) -> f64 {
    2.0 * leg_length * (0.5 * angle_deg.to_radians()).sin()
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadWalk {
    /// `(time s, body position mm)` sampled at the controller rate.
    pub trajectory: Vec<(f64, f64)>,
    /// Mean speed over whole cycles, mm/s.
    pub mean_speed: f64,
}

/// Walks for `duration` seconds; within a phase the body moves uniformly.
pub fn quad_walk(
    model: &QuadrupedModel,
    pressure: f64,
    added_mass: f64,
    duration: f64,
) -> Result<QuadWalk, RobotError> {
    model.validate()?;
    positive("duration", duration)?;
    if !(pressure >= 0.0) || !(added_mass >= 0.0) {
        return Err(RobotError::InvalidParameter(
            "pressure and added mass must be >= 0".into(),
        ));
    }
    if pressure > QUAD_PRESSURE_LIMIT {
        warn!("{pressure} kPa exceeds the {QUAD_PRESSURE_LIMIT} kPa operating limit of the legs");
    }
    let step = model.step_length(pressure) * model.load_derating(added_mass);
    let per_cycle = step * model.phases.len() as f64;
    let position = |t: f64| {
        let cycles = (t / model.cycle_period).floor();
        let phase_t = t / model.cycle_period - cycles;
        let mut x = cycles * per_cycle;
        for ph in &model.phases {
            if phase_t >= ph.end {
                x += step;
            } else if phase_t > ph.start {
                x += step * (phase_t - ph.start) / (ph.end - ph.start);
            }
        }
        x
    };
    let samples = (duration * DEFAULT_SAMPLE_RATE + 1e-9).floor() as usize;
    let trajectory = (0..=samples)
        .map(|k| {
            let t = k as f64 / DEFAULT_SAMPLE_RATE;
            (t, position(t))
        })
        .collect();
    Ok(QuadWalk {
        trajectory,
        mean_speed: per_cycle / model.cycle_period,
    })
}

/// Stall mass that makes the robot walk at `speed` mm/s at `pressure` with
/// `added_mass` on board.
pub fn calibrate_stall_mass(
    model: &QuadrupedModel,
    pressure: f64,
    added_mass: f64,
    speed: f64,
) -> Result<f64, RobotError> {
    positive("added_mass", added_mass)?;
    positive("speed", speed)?;
    let unloaded = model.advance_per_cycle(pressure, 0.0) / model.cycle_period;
    if !(speed < unloaded) {
        return Err(RobotError::InvalidParameter(format!(
            "target speed {speed} mm/s is not below the unloaded speed {unloaded:.4} mm/s"
        )));
    }
    Ok(added_mass / (1.0 - speed / unloaded))
}

/// Speed against pressure at a fixed load.
pub fn pressure_sweep_csv(model: &QuadrupedModel, pressures: &[f64], added_mass: f64) -> String {
    let rows = ordered_map(pressures, |p| model.speed(p, added_mass));
    let mut out = String::from("pressure_kPa,speed_mm_s\n");
    for (p, v) in pressures.iter().zip(rows) {
        let _ = writeln!(out, "{p:.4},{v:.6}");
    }
    out
}

/// Speed against added load at a fixed pressure.
pub fn load_sweep_csv(model: &QuadrupedModel, loads: &[f64], pressure: f64) -> String {
    let rows = ordered_map(loads, |m| model.speed(pressure, m));
    let mut out = String::from("load_g,speed_mm_s\n");
    for (m, v) in loads.iter().zip(rows) {
        let _ = writeln!(out, "{m:.4},{v:.6}");
    }
    out
}
