//! Neo-Hookean stress and tangent under uniaxial stretch.

use nalgebra::{Matrix3, Vector3};
use pneusoft::material::{cauchy_stress, material_tangent, pk2_stress, strain_energy, DeformationState, HyperelasticParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = HyperelasticParams::default();
    println!("c10 = {} MPa, kappa = {} MPa", params.c10, params.kappa);
    println!("stretch,energy_mJ_per_mm3,S11_MPa,sigma11_MPa,D1111_MPa");
    for k in 0..=10 {
        let l = 1.0 + 0.05 * k as f64;
        // Volume-preserving lateral contraction.
        let f = Matrix3::from_diagonal(&Vector3::new(l, l.powf(-0.5), l.powf(-0.5)));
        let state = DeformationState::new(f)?;
        let w = strain_energy(&params, &state)?;
        let s = pk2_stress(&params, &state)?;
        let sigma = cauchy_stress(&params, &state)?;
        let d = material_tangent(&params, &state)?;
        println!("{l:.2},{w:.6},{:.6},{:.6},{:.3}", s[(0, 0)], sigma[(0, 0)], d.get(0, 0, 0, 0));
    }
    Ok(())
}
