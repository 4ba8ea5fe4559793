//! Earthworm speed against valve frequency.

use pneusoft::config::Config;
use pneusoft::robots::{earthworm_speed_sweep, speed_sweep_csv, parse_grid, speed_peak};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config::default();
    let model = cfg.earthworm()?;
    let sweep = earthworm_speed_sweep(&model, &cfg.plant()?, &parse_grid("0.2:1.6:0.1")?, 40.0)?;
    print!("{}", speed_sweep_csv(&sweep));
    if let Some((f, v)) = speed_peak(&sweep) {
        eprintln!("peak {v:.2} mm/s at {f} Hz; feet stick below {:.3} mm of stroke", model.threshold_stroke());
    }
    Ok(())
}
