//! Minimum grasp pressure with and without adhesive tape.

use pneusoft::config::Config;
use pneusoft::robots::{grasp_pressure_csv, max_liftable_mass, parse_grid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = Config::default().gripper()?;
    print!("{}", grasp_pressure_csv(&model, &parse_grid("0:300:50")?, model.reference_diameter)?);
    for tape in [false, true] {
        println!("tape {tape}: max mass at 40 kPa {:.1} g", max_liftable_mass(&model.with_tape(tape), 40.0)?);
    }
    Ok(())
}
