//! Grasp feasibility of a three-finger gripper.
//!
//! Each finger touches the object once the chamber reaches the contact
//! pressure, then presses with a normal force growing linearly with the
//! pressure beyond it, up to a saturation pressure where the fingers are
//! fully wrapped. The object is held when the friction of all fingers, plus
//! any adhesion, carries its weight.

use std::fmt::Write as _;

use super::{ordered_map, positive, RobotError, GRAVITY};

/// Dry-adhesive strip on the finger pads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tape {
    pub enabled: bool,
    pub mu: f64,
    /// Adhesion per finger once in contact, N.
    pub adhesion: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GripperModel {
    pub finger_count: usize,
    /// Two `(object diameter mm, contact pressure kPa)` points of the affine
    /// contact-pressure map.
    pub contact_points: [(f64, f64); 2],
    /// Normal force per finger per kPa beyond contact, N/kPa.
    pub normal_gain: f64,
    /// Pressure beyond which the normal force stops growing, kPa.
    pub saturation_pressure: f64,
    pub mu_plain: f64,
    pub tape: Tape,
    /// Gripper's own mass, g.
    pub gripper_mass: f64,
    /// Highest pressure the gripper is driven to, kPa.
    pub pressure_cap: f64,
    /// Object diameter used by `max_liftable_mass`, mm.
    pub reference_diameter: f64,
}

/// Outcome of a minimum-pressure search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraspPressure {
    Feasible(f64),
    Infeasible,
}

impl GraspPressure {
    pub fn kpa(self) -> Option<f64> {
        match self {
            GraspPressure::Feasible(p) => Some(p),
            GraspPressure::Infeasible => None,
        }
    }
}

impl GripperModel {
    pub fn validate(&self) -> Result<(), RobotError> {
        if self.finger_count == 0 {
            return Err(RobotError::InvalidParameter("finger_count must be > 0".into()));
        }
        let nonneg = |name: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(RobotError::InvalidParameter(format!("{name} must be >= 0, got {v}")))
            }
        };
        nonneg("normal_gain", self.normal_gain)?;
        nonneg("tape.adhesion", self.tape.adhesion)?;
        positive("mu_plain", self.mu_plain)?;
        positive("saturation_pressure", self.saturation_pressure)?;
        positive("pressure_cap", self.pressure_cap)?;
        positive("reference_diameter", self.reference_diameter)?;
        if !(self.tape.mu >= self.mu_plain) {
            return Err(RobotError::InvalidParameter(format!(
                "tape friction {} must be >= plain friction {}",
                self.tape.mu, self.mu_plain
            )));
        }
        let [(d0, _), (d1, _)] = self.contact_points;
        if d0 == d1 {
            return Err(RobotError::InvalidParameter(
                "contact points need two different diameters".into(),
            ));
        }
        Ok(())
    }

    pub fn with_tape(&self, enabled: bool) -> Self {
        let mut m = self.clone();
        m.tape.enabled = enabled;
        m
    }

    /// Pressure at which the fingers first touch an object of this diameter.
    pub fn contact_pressure(&self, diameter: f64) -> f64 {
        let [(d0, c0), (d1, c1)] = self.contact_points;
        (c0 + (c1 - c0) * (diameter - d0) / (d1 - d0)).max(0.0)
    }

    fn friction_and_adhesion(&self) -> (f64, f64) {
        if self.tape.enabled {
            (self.tape.mu, self.tape.adhesion)
        } else {
            (self.mu_plain, 0.0)
        }
    }

    /// Vertical holding force at `pressure` on an object of `diameter`, N.
    pub fn holding_force(&self, pressure: f64, diameter: f64) -> f64 {
        let c = self.contact_pressure(diameter);
        if pressure < c {
            return 0.0;
        }
        let (mu, adhesion) = self.friction_and_adhesion();
        let squeeze = pressure.min(self.saturation_pressure) - c;
        self.finger_count as f64 * (mu * self.normal_gain * squeeze.max(0.0) + adhesion)
    }
}

/// Smallest pressure that holds an object of `mass` grams.
pub fn min_grasp_pressure(model: &GripperModel, mass: f64, diameter: f64) -> Result<GraspPressure, RobotError> {
    model.validate()?;
    if !(mass >= 0.0) {
        return Err(RobotError::InvalidParameter(format!("mass must be >= 0, got {mass}")));
    }
    let c = model.contact_pressure(diameter);
    let weight = mass * 1e-3 * GRAVITY;
    let (mu, adhesion) = model.friction_and_adhesion();
    let per_finger = weight / model.finger_count as f64 - adhesion;
    let p = if per_finger <= 0.0 {
        c
    } else if model.normal_gain * mu > 0.0 {
        c + per_finger / (mu * model.normal_gain)
    } else {
        return Ok(GraspPressure::Infeasible);
    };
    let limit = model.pressure_cap.min(model.saturation_pressure.max(c));
    if p <= limit * (1.0 + 1e-12) {
        Ok(GraspPressure::Feasible(p))
    } else {
        Ok(GraspPressure::Infeasible)
    }
}

/// Heaviest object of the reference diameter held at `p_cap`, g.
pub fn max_liftable_mass(model: &GripperModel, p_cap: f64) -> Result<f64, RobotError> {
    model.validate()?;
    let p = p_cap.min(model.pressure_cap);
    Ok(model.holding_force(p, model.reference_diameter) / GRAVITY * 1e3)
}

/// Minimum pressures with and without tape; infeasible entries are `nan`.
pub fn grasp_pressure_csv(model: &GripperModel, masses: &[f64], diameter: f64) -> Result<String, RobotError> {
    let plain = model.with_tape(false);
    let taped = model.with_tape(true);
    let rows = ordered_map(masses, |m| {
        Ok::<_, RobotError>((
            min_grasp_pressure(&plain, m, diameter)?,
            min_grasp_pressure(&taped, m, diameter)?,
        ))
    });
    let cell = |g: GraspPressure| g.kpa().map_or("nan".to_string(), |p| format!("{p:.6}"));
    let mut out = String::from("mass_g,p_min_plain_kPa,p_min_tape_kPa\n");
    for (m, row) in masses.iter().zip(rows) {
        let (a, b) = row?;
        let _ = writeln!(out, "{m:.4},{},{}", cell(a), cell(b));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> GripperModel {
        GripperModel {
            finger_count: 3,
            contact_points: [(40.0, 4.0), (80.0, 1.0)],
            normal_gain: 0.05,
            saturation_pressure: 40.0,
            mu_plain: 0.342,
            tape: Tape {
                enabled: false,
                mu: 1.14,
                adhesion: 0.0,
            },
            gripper_mass: 54.0,
            pressure_cap: 100.0,
            reference_diameter: 70.0,
        }
    }

    #[test]
    fn massless_object_needs_contact_only() {
        let m = model();
        assert_eq!(
            min_grasp_pressure(&m, 0.0, 70.0).unwrap(),
            GraspPressure::Feasible(m.contact_pressure(70.0))
        );
        assert!((m.contact_pressure(70.0) - 1.75).abs() < 1e-12);
    }

    #[test]
    fn min_pressure_inverts_holding_force() {
        let m = model().with_tape(true);
        let p = min_grasp_pressure(&m, 150.0, 60.0).unwrap().kpa().unwrap();
        assert!((m.holding_force(p, 60.0) - 0.150 * GRAVITY).abs() < 1e-12);
    }

    #[test]
    fn no_gain_lifts_nothing() {
        let mut m = model();
        m.normal_gain = 0.0;
        assert_eq!(max_liftable_mass(&m, 40.0).unwrap(), 0.0);
        assert_eq!(min_grasp_pressure(&m, 10.0, 70.0).unwrap(), GraspPressure::Infeasible);
    }

    #[test]
    fn pressure_beyond_saturation_adds_nothing() {
        let m = model();
        assert_eq!(max_liftable_mass(&m, 40.0).unwrap(), max_liftable_mass(&m, 90.0).unwrap());
    }
}
