//! Reduced-order models of the three demonstrators built from the actuators:
//! a stick-slip earthworm, an antisymmetric-gait quadruped and a
//! three-finger gripper.

pub mod earthworm;
pub mod gripper;
pub mod quadruped;

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::pneumatics::PneumaticError;

pub use earthworm::{
    earthworm_cycle, earthworm_speed_sweep, speed_sweep_csv, speed_peak, EarthwormModel, LegSwitch,
};
pub use gripper::{grasp_pressure_csv, max_liftable_mass, min_grasp_pressure, GraspPressure, GripperModel, Tape};
pub use quadruped::{
    calibrate_stall_mass, pressure_sweep_csv, load_sweep_csv, quad_walk, step_length_from_bend, GaitPhase, Leg, QuadWalk,
    QuadrupedModel, QUAD_PRESSURE_LIMIT,
};

/// Standard gravity, m/s².
pub const GRAVITY: f64 = 9.81;

#[derive(Debug, Error, PartialEq)]
pub enum RobotError {
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Pneumatic(#[from] PneumaticError),
}

fn positive(name: &str, v: f64) -> Result<(), RobotError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(RobotError::InvalidParameter(format!("{name} must be > 0, got {v}")))
    }
}

/// Piecewise-linear map from pressure (kPa) to a response, held constant
/// beyond the last breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct LookupTable {
    points: Vec<(f64, f64)>,
}

impl LookupTable {
    /// Builds a table from breakpoints. Abscissae must start at 0 and be
    /// strictly increasing, ordinates non-decreasing with value 0 at 0.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, RobotError> {
        let bad = |m: &str| Err(RobotError::InvalidTable(m.to_string()));
        if points.is_empty() {
            return bad("at least one breakpoint is required");
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return bad("breakpoints must be finite");
        }
        if points[0] != (0.0, 0.0) {
            return bad("the first breakpoint must be (0, 0)");
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return bad("pressures must be strictly increasing");
            }
            if w[1].1 < w[0].1 {
                return bad("values must be non-decreasing");
            }
        }
        Ok(LookupTable { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn eval(&self, p: f64) -> f64 {
        let pts = &self.points;
        if p <= 0.0 {
            return 0.0;
        }
        let last = pts[pts.len() - 1];
        if p >= last.0 {
            return last.1;
        }
        let k = pts.partition_point(|q| q.0 <= p);
        let (a, b) = (pts[k - 1], pts[k]);
        a.1 + (b.1 - a.1) * (p - a.0) / (b.0 - a.0)
    }

    /// Parses `p:v, p:v, ...`.
    pub fn parse(text: &str) -> Result<Self, RobotError> {
        let mut points = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (p, v) = item
                .split_once(':')
                .ok_or_else(|| RobotError::InvalidTable(format!("expected 'pressure:value', got '{item}'")))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| RobotError::InvalidTable(format!("not a number: '{}'", s.trim())))
            };
            points.push((num(p)?, num(v)?));
        }
        LookupTable::new(points)
    }
}

impl fmt::Display for LookupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.points.iter().map(|(p, v)| format!("{p}:{v}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Evaluates `f` over `xs` on the rayon pool, keeping input order.
pub(crate) fn ordered_map<T, F>(xs: &[f64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync,
{
    xs.par_iter().map(|&x| f(x)).collect()
}

/// Inclusive grid `start:stop:step` as used by the sweep flags.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, RobotError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || RobotError::InvalidParameter(format!("expected start:stop:step, got '{text}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let (start, stop, step) = (v[0], v[1], v[2]);
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    // Rounded to the step's decimals so 0.2 + 6·0.1 prints as 0.8.
    let decimals = 10f64.powi(12);
    Ok((0..=n)
        .map(|k| ((start + k as f64 * step) * decimals).round() / decimals)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_interpolates_and_saturates() {
        let t = LookupTable::parse("0:0, 6:0, 12:24").unwrap();
        assert_eq!(t.eval(-1.0), 0.0);
        assert_eq!(t.eval(3.0), 0.0);
        assert_eq!(t.eval(9.0), 12.0);
        assert_eq!(t.eval(100.0), 24.0);
        assert_eq!(LookupTable::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn table_rejects_decreasing_values() {
        assert!(LookupTable::parse("0:0, 5:2, 10:1").is_err());
        assert!(LookupTable::parse("1:0, 5:2").is_err());
        assert!(LookupTable::parse("0:0, 5:2, 5:3").is_err());
    }

    #[test]
    fn grid_is_inclusive() {
        let g = parse_grid("0.2:1.6:0.1").unwrap();
        assert_eq!(g.len(), 15);
        assert_eq!(g[6], 0.8);
        assert_eq!(*g.last().unwrap(), 1.6);
        assert!(parse_grid("1:0:0.1").is_err());
    }
}
