//! Dissolving-bath heater held at 65 °C by a thermostat.

use pneusoft::config::Config;
use pneusoft::pneumatics::{run_bath, steady_duty};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bath = Config::default().bath()?;
    let trace = run_bath(&bath, 65.0, 1.0, 3.0 * 3600.0, 1.0)?;
    let reach = trace.iter().find(|s| s.temperature >= 64.0).map(|s| s.time);
    let peak = trace.iter().map(|s| s.temperature).fold(f64::MIN, f64::max);
    println!("set point reached after {:.0} s, peak {peak:.2} °C", reach.unwrap_or(f64::NAN));
    println!("steady heater duty {:.3}", steady_duty(&trace, 2.0 * 3600.0));
    Ok(())
}
