//! Plane-strain tube inflation against the closed-form oracle fixture.

use pneusoft::material::HyperelasticParams;
use pneusoft::verify::{cylinder_bore_fea, cylinder_oracle};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = HyperelasticParams::default();
    let oracle = cylinder_oracle();
    let fea = cylinder_bore_fea(&params, 2.0, 150.0, oracle.len())?;
    println!("pressure_kPa,oracle_mm,fea_mm,expansion_error_pct");
    for ((p, a), (_, r)) in oracle.iter().zip(&fea[1..]) {
        println!("{p:.0},{a:.5},{r:.5},{:.3}", 100.0 * ((r - 5.0) - (a - 5.0)) / (a - 5.0));
    }
    Ok(())
}
