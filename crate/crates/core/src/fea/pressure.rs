//! Follower pressure on six-node faces, integrated over the deformed
//! surface.
//!
//! Faces in a pressure set are oriented with their normal pointing out of
//! the solid, into the pressurized region, so the nodal load is
//! `f_a = -p ∫ N_a (x,ξ × x,η) dξ dη`.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};

use super::sparse::{Pattern, SparseMatrix};
use super::{FeaError, KPA};
use crate::mesh::shape::{tri6_gradients, tri6_values, tri_quadrature};
use crate::mesh::{Mesh, Point};

pub type Vec18 = SVector<f64, 18>;
pub type Mat18 = SMatrix<f64, 18, 18>;

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

fn current_face(mesh: &Mesh, face: &[usize; 6], u: &[f64]) -> [Point; 6] {
    let mut x = [Point::zeros(); 6];
    for (a, &n) in face.iter().enumerate() {
        x[a] = mesh.nodes[n] + Vector3::new(u[3 * n], u[3 * n + 1], u[3 * n + 2]);
    }
    x
}

/// Load vector of one face and the derivative of that load with respect to
/// the face's nodal positions. `p` in MPa.
pub fn face_load(x: &[Point; 6], p: f64, with_stiffness: bool) -> Option<(Vec18, Option<Mat18>)> {
    let mut f = Vec18::zeros();
    let mut k = if with_stiffness { Some(Mat18::zeros()) } else { None };
    let scale = (x[1] - x[0]).norm_squared().max((x[2] - x[0]).norm_squared());
    for q in tri_quadrature() {
        let xi = [q.xi[0], q.xi[1]];
        let nv = tri6_values(xi);
        let g = tri6_gradients(xi);
        let mut t1 = Vector3::zeros();
        let mut t2 = Vector3::zeros();
        for a in 0..6 {
            t1 += x[a] * g[a][0];
            t2 += x[a] * g[a][1];
        }
        let n = t1.cross(&t2);
        if !(n.norm() > 1e-12 * scale) {
            return None;
        }
        let w = q.weight * p;
        for a in 0..6 {
            let fa = -n * (nv[a] * w);
            f[3 * a] += fa.x;
            f[3 * a + 1] += fa.y;
            f[3 * a + 2] += fa.z;
        }
        if let Some(k) = k.as_mut() {
            let s1 = skew(&t1);
            let s2 = skew(&t2);
            for b in 0..6 {
                // d(t1 × t2)/dx_b = N_b,η [t1]× − N_b,ξ [t2]×
                let dn = s1 * g[b][1] - s2 * g[b][0];
                for a in 0..6 {
                    let block = -dn * (nv[a] * w);
                    for i in 0..3 {
                        for j in 0..3 {
                            k[(3 * a + i, 3 * b + j)] += block[(i, j)];
                        }
                    }
                }
            }
        }
    }
    Some((f, k))
}

/// Nodal pressure load, N, for gauge pressure `p_kpa` on the face set.
pub fn pressure_force(mesh: &Mesh, pressure_set: &str, p_kpa: f64, u: &[f64]) -> Result<Vec<f64>, FeaError> {
    let faces = mesh.face_set(pressure_set)?;
    if u.len() != 3 * mesh.nodes.len() {
        return Err(FeaError::DimensionMismatch {
            got: u.len(),
            expected: 3 * mesh.nodes.len(),
        });
    }
    let mut out = vec![0.0; u.len()];
    let p = p_kpa * KPA;
    for (i, face) in faces.iter().enumerate() {
        let x = current_face(mesh, face, u);
        let (f, _) = face_load(&x, p, false).ok_or_else(|| FeaError::DegenerateFace {
            set: pressure_set.to_string(),
            face: i,
        })?;
        for (a, &n) in face.iter().enumerate() {
            for c in 0..3 {
                out[3 * n + c] += f[3 * a + c];
            }
        }
    }
    Ok(out)
}

/// Pressure load and its Jacobian `∂f/∂u` assembled into the pattern.
pub(crate) fn pressure_force_and_stiffness(
    mesh: &Mesh,
    pressure_set: &str,
    faces: &[[usize; 6]],
    slots: &[[u32; 36]],
    p_kpa: f64,
    u: &[f64],
    pattern: &Pattern,
    k: &mut SparseMatrix,
) -> Result<Vec<f64>, FeaError> {
    let mut out = vec![0.0; u.len()];
    let p = p_kpa * KPA;
    if p == 0.0 {
        return Ok(out);
    }
    let mut block = [0.0; 324];
    for (i, face) in faces.iter().enumerate() {
        let x = current_face(mesh, face, u);
        let (f, kf) = face_load(&x, p, true).ok_or_else(|| FeaError::DegenerateFace {
            set: pressure_set.to_string(),
            face: i,
        })?;
        for (a, &n) in face.iter().enumerate() {
            for c in 0..3 {
                out[3 * n + c] += f[3 * a + c];
            }
        }
        let kf = kf.expect("stiffness requested");
        // the tangent enters the residual with a minus sign
        for r in 0..18 {
            for c in 0..18 {
                block[r * 18 + c] = -kf[(r, c)];
            }
        }
        pattern.scatter::<6>(&mut k.values, face, &slots[i], &block);
    }
    Ok(out)
}

/// Resultant force and moment about the origin of a nodal force vector
/// restricted to the nodes of a face set.
pub fn pressure_resultant(mesh: &Mesh, force: &[f64], u: &[f64]) -> (Vector3<f64>, Vector3<f64>) {
    let mut total = Vector3::zeros();
    let mut moment = Vector3::zeros();
    for n in 0..mesh.nodes.len() {
        let f = Vector3::new(force[3 * n], force[3 * n + 1], force[3 * n + 2]);
        if f == Vector3::zeros() {
            continue;
        }
        let x = mesh.nodes[n] + Vector3::new(u[3 * n], u[3 * n + 1], u[3 * n + 2]);
        total += f;
        moment += x.cross(&f);
    }
    (total, moment)
}

/// Deformed area of a face set.
pub fn face_set_area(mesh: &Mesh, set: &str, u: &[f64]) -> Result<f64, FeaError> {
    let x: Vec<Point> = mesh
        .nodes
        .iter()
        .enumerate()
        .map(|(n, p)| p + Vector3::new(u[3 * n], u[3 * n + 1], u[3 * n + 2]))
        .collect();
    Ok(mesh.face_set_normal_sum(set, Some(&x))?.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square_faces() -> Mesh {
        // two straight six-node triangles tiling [0,1]² at z = 0, normal +z
        let mut m = Mesh::default();
        let pts = [
            (0.0, 0.0),
            (1.0, 0.0),
            (1.0, 1.0),
            (0.0, 1.0),
            (0.5, 0.0),
            (1.0, 0.5),
            (0.5, 0.5),
            (0.5, 1.0),
            (0.0, 0.5),
        ];
        m.nodes = pts.iter().map(|&(x, y)| Point::new(x, y, 0.0)).collect();
        m.face_sets
            .insert("sq".into(), vec![[0, 1, 2, 4, 5, 6], [0, 2, 3, 6, 7, 8]]);
        m
    }

    #[test]
    fn unit_square_resultant() {
        let m = unit_square_faces();
        let u = vec![0.0; 27];
        let f = pressure_force(&m, "sq", 10.0, &u).unwrap();
        let (r, _) = pressure_resultant(&m, &f, &u);
        // 10 kPa on 1 mm² pushes against the +z face normal
        assert!((r - Vector3::new(0.0, 0.0, -0.01)).norm() < 1e-15);
        let zero = pressure_force(&m, "sq", 0.0, &u).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn face_stiffness_matches_finite_difference() {
        let mut x = [Point::zeros(); 6];
        let corners = [Point::new(0.1, 0.0, 0.2), Point::new(1.3, 0.2, -0.1), Point::new(0.2, 0.9, 0.4)];
        x[..3].copy_from_slice(&corners);
        x[3] = (corners[0] + corners[1]) * 0.5 + Vector3::new(0.0, 0.0, 0.1);
        x[4] = (corners[1] + corners[2]) * 0.5 + Vector3::new(0.05, 0.0, 0.0);
        x[5] = (corners[2] + corners[0]) * 0.5 + Vector3::new(0.0, -0.02, 0.0);
        let (_, k) = face_load(&x, 0.07, true).unwrap();
        let k = k.unwrap();
        let h = 1e-6;
        for b in 0..6 {
            for j in 0..3 {
                let mut xp = x;
                let mut xm = x;
                xp[b][j] += h;
                xm[b][j] -= h;
                let fp = face_load(&xp, 0.07, false).unwrap().0;
                let fm = face_load(&xm, 0.07, false).unwrap().0;
                for r in 0..18 {
                    let fd = (fp[r] - fm[r]) / (2.0 * h);
                    assert!((fd - k[(r, 3 * b + j)]).abs() < 1e-8, "{fd} vs {}", k[(r, 3 * b + j)]);
                }
            }
        }
    }

    #[test]
    fn collapsed_face_is_rejected() {
        let x = [Point::zeros(); 6];
        assert!(face_load(&x, 1.0, false).is_none());
    }
}
