//! Pressure ramp on the coarse walking-leg actuator, printed as solver CSV.

use pneusoft::config::Config;
use pneusoft::fea::{solution_csv, solve_with, LoadCase};
use pneusoft::mesh::{generate_mesh, ActuatorSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let cfg = Config::default();
    let mesh = generate_mesh(&ActuatorSpec::bending2(), 4.0)?;
    let lc = LoadCase::new(60.0).with_increments(10);
    let sol = solve_with(&mesh, &cfg.material()?, &lc, &cfg.newton()?)?;
    print!("{}", solution_csv(&mesh, &sol)?);
    eprintln!("{} Newton iterations", sol.total_iterations());
    Ok(())
}
