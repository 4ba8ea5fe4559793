//! Post-processing of displacement fields.

use std::fmt::Write as _;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use super::solver::Solution;
use super::FeaError;
use crate::mesh::{Mesh, Point, TIP_SET};

pub const CSV_HEADER: &str = "increment,pressure_kPa,elongation_mm,bend_angle_deg,max_displacement_mm";

fn nodal(u: &[f64], n: usize) -> Vector3<f64> {
    Vector3::new(u[3 * n], u[3 * n + 1], u[3 * n + 2])
}

/// Axial (z) displacement of the centroid of a node set.
pub fn elongation(mesh: &Mesh, u: &[f64], set: &str) -> Result<f64, FeaError> {
    let ids = mesh.node_set(set)?;
    if ids.is_empty() {
        return Err(FeaError::Measurement(format!("node set '{set}' is empty")));
    }
    Ok(ids.iter().map(|&n| u[3 * n + 2]).sum::<f64>() / ids.len() as f64)
}

/// Unit normal of the least-squares plane through `points`.
fn plane_normal(points: &[Point]) -> Result<(Point, Vector3<f64>), FeaError> {
    let c = points.iter().sum::<Point>() / points.len() as f64;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p - c;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let (mid, hi) = (eig.eigenvalues[order[1]], eig.eigenvalues[order[2]]);
    if !(hi > 0.0) || mid <= 1e-12 * hi {
        return Err(FeaError::Measurement("end-face nodes are collinear".into()));
    }
    Ok((c, eig.eigenvectors.column(order[0]).into_owned()))
}

/// Best-fit rotation taking the centred reference cloud onto the centred
/// deformed cloud.
fn kabsch(reference: &[Point], deformed: &[Point], c0: &Point, c1: &Point) -> Matrix3<f64> {
    let mut h = Matrix3::zeros();
    for (p, q) in reference.iter().zip(deformed) {
        h += (q - c1) * (p - c0).transpose();
    }
    let svd = h.svd(true, true);
    let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let mut d = Matrix3::identity();
    if (u * vt).determinant() < 0.0 {
        d[(2, 2)] = -1.0;
    }
    u * d * vt
}

/// Angle in degrees between the reference and deformed best-fit planes of a
/// node set, in `[0, 180)`.
pub fn bend_angle(mesh: &Mesh, u: &[f64], set: &str) -> Result<f64, FeaError> {
    let ids = mesh.node_set(set)?;
    if ids.len() < 3 {
        return Err(FeaError::Measurement(format!("node set '{set}' has fewer than 3 nodes")));
    }
    let reference: Vec<Point> = ids.iter().map(|&n| mesh.nodes[n]).collect();
    let deformed: Vec<Point> = ids.iter().map(|&n| mesh.nodes[n] + nodal(u, n)).collect();
    let (c0, n0) = plane_normal(&reference)?;
    let (c1, mut n1) = plane_normal(&deformed)?;
    let r = kabsch(&reference, &deformed, &c0, &c1);
    if n1.dot(&(r * n0)) < 0.0 {
        n1 = -n1;
    }
    let angle = n0.dot(&n1).clamp(-1.0, 1.0).acos().to_degrees();
    Ok(if angle >= 180.0 { 0.0 } else { angle })
}

/// Largest nodal displacement magnitude.
pub fn max_displacement(u: &[f64]) -> f64 {
    u.chunks_exact(3)
        .map(|c| (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt())
        .fold(0.0, f64::max)
}

/// Tip elongation per increment.
pub fn measure_elongation(mesh: &Mesh, solution: &Solution) -> Result<Vec<f64>, FeaError> {
    solution
        .increments
        .iter()
        .map(|inc| elongation(mesh, &inc.displacement, TIP_SET))
        .collect()
}

/// Tip bending angle per increment.
pub fn measure_bend_angle(mesh: &Mesh, solution: &Solution) -> Result<Vec<f64>, FeaError> {
    solution
        .increments
        .iter()
        .map(|inc| bend_angle(mesh, &inc.displacement, TIP_SET))
        .collect()
}

/// One CSV row per increment. Quantities that need the `tip` set are left
/// as `nan` when the mesh has none.
pub fn solution_csv(mesh: &Mesh, solution: &Solution) -> Result<String, FeaError> {
    let has_tip = mesh.node_sets.contains_key(TIP_SET);
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (i, inc) in solution.increments.iter().enumerate() {
        let u = &inc.displacement;
        let (el, angle) = if has_tip {
            (elongation(mesh, u, TIP_SET)?, bend_angle(mesh, u, TIP_SET)?)
        } else {
            (f64::NAN, f64::NAN)
        };
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6}",
            i,
            inc.pressure_kpa,
            el,
            angle,
            max_displacement(u)
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::template::block_mesh;
    use nalgebra::Rotation3;

    fn rigid(mesh: &Mesh, rot: &Matrix3<f64>, t: &Vector3<f64>) -> Vec<f64> {
        let mut u = vec![0.0; 3 * mesh.nodes.len()];
        for (n, x) in mesh.nodes.iter().enumerate() {
            let d = rot * x + t - x;
            u[3 * n..3 * n + 3].copy_from_slice(d.as_slice());
        }
        u
    }

    #[test]
    fn zero_field_measures_zero() {
        let m = block_mesh(2.0, 2.0, 4.0, 1.0).unwrap();
        let u = vec![0.0; 3 * m.nodes.len()];
        assert_eq!(elongation(&m, &u, TIP_SET).unwrap(), 0.0);
        assert_eq!(bend_angle(&m, &u, TIP_SET).unwrap(), 0.0);
    }

    #[test]
    fn rigid_translation_gives_its_magnitude() {
        let m = block_mesh(2.0, 2.0, 4.0, 1.0).unwrap();
        let u = rigid(&m, &Matrix3::identity(), &Vector3::new(0.3, -0.2, 1.25));
        assert!((elongation(&m, &u, TIP_SET).unwrap() - 1.25).abs() < 1e-14);
        assert!(bend_angle(&m, &u, TIP_SET).unwrap() < 1e-6);
    }

    #[test]
    fn constructed_rotations_are_recovered() {
        let m = block_mesh(2.0, 2.0, 4.0, 1.0).unwrap();
        for deg in [30.0f64, 95.0, 150.0] {
            let rot = Rotation3::from_axis_angle(&Vector3::x_axis(), deg.to_radians());
            let u = rigid(&m, rot.matrix(), &Vector3::new(0.0, 1.0, 0.0));
            assert!((bend_angle(&m, &u, TIP_SET).unwrap() - deg).abs() < 1e-6, "{deg}");
        }
    }

    #[test]
    fn collinear_set_is_an_error() {
        let mut m = Mesh::default();
        m.nodes = (0..4).map(|i| Point::new(i as f64, 0.0, 0.0)).collect();
        m.node_sets.insert(TIP_SET.into(), vec![0, 1, 2, 3]);
        let u = vec![0.0; 12];
        assert!(matches!(bend_angle(&m, &u, TIP_SET), Err(FeaError::Measurement(_))));
    }
}
