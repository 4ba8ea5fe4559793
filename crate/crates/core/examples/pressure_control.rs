//! On/off valve control of one chamber: hysteresis around a set point, then
//! a fixed-frequency square wave.

use pneusoft::pneumatics::{cycle_amplitude, run_controller, OnOffController, PneumaticPlant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plant = PneumaticPlant::new(250.0, 0.20, 0.35)?;
    let trace = run_controller(&OnOffController::hysteresis(40.0, 2.0), &plant, 5.0)?;
    let late: Vec<f64> = trace.iter().filter(|s| s.time >= 1.0).map(|s| s.pressure).collect();
    let (lo, hi) = late.iter().fold((f64::MAX, f64::MIN), |(a, b), &p| (a.min(p), b.max(p)));
    println!("hysteresis 40 ± 2 kPa on a 250 kPa line: band [{lo:.2}, {hi:.2}] kPa");

    let plant = PneumaticPlant::default();
    println!("frequency_Hz,p_max_kPa,p_min_kPa");
    for f in [0.2, 0.5, 0.8, 1.0, 1.3, 2.0] {
        let (hi, lo) = cycle_amplitude(&plant, f, 0.5, plant.supply_pressure)?;
        println!("{f},{hi:.3},{lo:.3}");
    }
    Ok(())
}
