//! Generate the three actuator archetypes, report quality and round-trip
//! one through the ASCII mesh format.

use pneusoft::mesh::{generate_mesh, mesh_quality, parse_mesh, write_mesh, ActuatorSpec, CAVITY_SET};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (spec, h) in [
        (ActuatorSpec::linear(), 3.0),
        (ActuatorSpec::bending1(), 3.0),
        (ActuatorSpec::bending2(), 4.0),
    ] {
        let mesh = generate_mesh(&spec, h)?;
        println!("{:?} at h = {h} mm: {} nodes", spec.kind, mesh.node_count());
        println!("  {}", mesh_quality(&mesh));
        println!("  cavity volume {:.1} mm^3", mesh.enclosed_volume(CAVITY_SET, None)?);
        let text = write_mesh(&mesh);
        assert_eq!(parse_mesh(&text)?, mesh);
        println!("  {} bytes as ASCII, round trip exact", text.len());
    }
    Ok(())
}
