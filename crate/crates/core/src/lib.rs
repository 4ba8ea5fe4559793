//! Simulation toolkit for single-chamber pneumatic soft actuators and the
//! robots built from them.
//!
//! * [`material`]: nearly incompressible neo-Hookean law and its calibration.
//! * [`mesh`]: quadratic tetrahedral meshes of the actuator archetypes.
//! * [`fea`]: total-Lagrangian static solver with follower pressure.
//! * [`pneumatics`]: valve, chamber and thermostat control loops.
//! * [`robots`]: earthworm, quadruped and gripper reduced-order models.
//! * [`cli`]: the `pneusoft` command line.
//! * [`config`]: layered run configuration.
//! * [`verify`]: built-in oracle suite.

pub mod cli;
pub mod config;
pub mod fea;
pub mod material;
pub mod mesh;
pub mod pneumatics;
pub mod robots;
pub mod verify;
