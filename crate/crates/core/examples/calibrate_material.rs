//! Recover c10 from synthetic tube-inflation measurements with the FEA
//! cylinder as forward model.

use pneusoft::material::{calibrate_c10, CalibrationBounds, HyperelasticParams};
use pneusoft::verify::cylinder_bore_fea;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let forward = |c10: f64, p: f64| -> Result<f64, String> {
        let rows = cylinder_bore_fea(&HyperelasticParams::with_kappa_ratio(c10, 1000.0), 2.0, p, 3)
            .map_err(|e| e.to_string())?;
        Ok(rows.last().expect("ramp has increments").1 - 5.0)
    };
    let truth = 0.24;
    let obs: Vec<(f64, f64)> = [40.0, 80.0, 120.0]
        .iter()
        .map(|&p| forward(truth, p).map(|d| (p, d)))
        .collect::<Result<_, _>>()?;
    let fit = calibrate_c10(&obs, forward, CalibrationBounds::default())?;
    println!("generated with c10 = {truth}, recovered {:.5} MPa after {} evaluations", fit.c10, fit.evaluations);
    Ok(())
}
