//! Total-Lagrangian static solver for pressurized hyperelastic bodies.
//!
//! Units throughout are mm, N and MPa; pressures at the API boundary are in
//! kPa. Displacement fields are flat vectors `[u0x, u0y, u0z, u1x, ...]`.

pub mod assembly;
pub mod measure;
pub mod pressure;
pub mod solver;
pub mod sparse;

use thiserror::Error;

use crate::material::MaterialError;
use crate::mesh::MeshError;

pub use assembly::{internal_force, tangent_stiffness, total_energy, Model};
pub use measure::{
    bend_angle, elongation, max_displacement, measure_bend_angle, measure_elongation, solution_csv, CSV_HEADER,
};
pub use pressure::{pressure_force, pressure_resultant};
pub use solver::{solve, solve_with, AxisConstraint, Increment, IncrementLog, LoadCase, NewtonSettings, Solution};
pub use sparse::SparseMatrix;

/// kPa to MPa (N/mm²).
pub const KPA: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum FeaError {
    #[error("element {element} inverted (det F = {det:e})")]
    InvertedElement { element: usize, det: f64 },
    #[error("face {face} of set '{set}' has degenerate deformed area")]
    DegenerateFace { set: String, face: usize },
    #[error("invalid load case: {0}")]
    InvalidLoadCase(String),
    #[error("displacement vector has length {got}, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("linear solve failed: {0}")]
    LinearSolve(String),
    #[error(
        "no convergence at {attempted_kpa:.6} kPa (last converged {converged_kpa:.6} kPa) after {bisections} \
         bisections; last attempt: {iterations} iterations, residual {residual:e}"
    )]
    NoConvergence {
        converged_kpa: f64,
        attempted_kpa: f64,
        bisections: u32,
        iterations: usize,
        residual: f64,
    },
    #[error("measurement failed: {0}")]
    Measurement(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Material(#[from] MaterialError),
}

impl FeaError {
    /// Errors that a smaller load step may cure.
    pub fn is_step_rejection(&self) -> bool {
        matches!(
            self,
            FeaError::InvertedElement { .. } | FeaError::DegenerateFace { .. } | FeaError::LinearSolve(_)
        )
    }
}
