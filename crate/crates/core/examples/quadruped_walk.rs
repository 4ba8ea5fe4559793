//! Quadruped speed against pressure and payload.

use pneusoft::config::Config;
use pneusoft::robots::{pressure_sweep_csv, load_sweep_csv, parse_grid, quad_walk};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = Config::default().quadruped()?;
    let walk = quad_walk(&model, 50.0, 80.0, 9.0)?;
    println!("50 kPa, 80 g: {:.2} mm/s over {} samples", walk.mean_speed, walk.trajectory.len());
    print!("{}", pressure_sweep_csv(&model, &parse_grid("10:60:10")?, 0.0));
    print!("{}", load_sweep_csv(&model, &parse_grid("0:200:40")?, 50.0));
    Ok(())
}
