//! Element quality report. Never fails; inverted or degenerate elements are
//! flagged instead.

use super::shape::{tet10_node_coords, tet_quadrature};
use super::{Mesh, Point};

/// Elements with a Jacobian ratio below this value are flagged.
pub const FLAG_JACOBIAN_RATIO: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub element_count: usize,
    /// Smallest `min det J / max |det J|` over all elements; negative for
    /// inverted elements.
    pub min_jacobian_ratio: f64,
    /// Smallest dihedral angle of the corner tetrahedra, degrees.
    pub min_dihedral_deg: f64,
    pub flagged: Vec<usize>,
}

impl std::fmt::Display for QualityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} elements, min Jacobian ratio {:.4}, min dihedral angle {:.2} deg, {} flagged elements",
            self.element_count,
            self.min_jacobian_ratio,
            self.min_dihedral_deg,
            self.flagged.len()
        )
    }
}

/// Jacobian ratio of one element, sampled at the nodes and quadrature points.
pub fn jacobian_ratio(mesh: &Mesh, conn: &[usize; 10]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let samples = tet10_node_coords()
        .into_iter()
        .chain(tet_quadrature().into_iter().map(|q| q.xi));
    for xi in samples {
        let d = mesh.jacobian(conn, xi).determinant();
        lo = lo.min(d);
        hi = hi.max(d.abs());
    }
    if hi == 0.0 || !lo.is_finite() {
        return f64::NEG_INFINITY;
    }
    lo / hi
}

/// Smallest dihedral angle of the straight corner tetrahedron, degrees.
pub fn min_dihedral(p: [Point; 4]) -> f64 {
    // face normals, outward for a positive tet
    let faces = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];
    let normals: Vec<Point> = faces
        .iter()
        .map(|f| (p[f[1]] - p[f[0]]).cross(&(p[f[2]] - p[f[0]])))
        .collect();
    let mut best = 180.0f64;
    for a in 0..4 {
        for b in (a + 1)..4 {
            let (na, nb) = (normals[a].norm(), normals[b].norm());
            if na == 0.0 || nb == 0.0 {
                return 0.0;
            }
            let c = (-normals[a].dot(&normals[b]) / (na * nb)).clamp(-1.0, 1.0);
            best = best.min(c.acos().to_degrees());
        }
    }
    best
}

pub fn mesh_quality(mesh: &Mesh) -> QualityReport {
    let mut report = QualityReport {
        element_count: mesh.elements.len(),
        min_jacobian_ratio: f64::INFINITY,
        min_dihedral_deg: 180.0,
        flagged: Vec::new(),
    };
    for (e, conn) in mesh.elements.iter().enumerate() {
        if conn.iter().any(|&n| n >= mesh.nodes.len()) {
            report.flagged.push(e);
            report.min_jacobian_ratio = f64::NEG_INFINITY;
            continue;
        }
        let r = jacobian_ratio(mesh, conn);
        report.min_jacobian_ratio = report.min_jacobian_ratio.min(r);
        let corners = [mesh.nodes[conn[0]], mesh.nodes[conn[1]], mesh.nodes[conn[2]], mesh.nodes[conn[3]]];
        report.min_dihedral_deg = report.min_dihedral_deg.min(min_dihedral(corners));
        if !(r >= FLAG_JACOBIAN_RATIO) {
            report.flagged.push(e);
        }
    }
    if mesh.elements.is_empty() {
        report.min_jacobian_ratio = 1.0;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::actuator::{generate_mesh, ActuatorSpec};
    use crate::mesh::shape::TET10_EDGES;

    pub(crate) fn regular_tet() -> Mesh {
        let s = 1.0 / 2f64.sqrt();
        let corners = [
            Point::new(1.0, 0.0, -s),
            Point::new(-1.0, 0.0, -s),
            Point::new(0.0, 1.0, s),
            Point::new(0.0, -1.0, s),
        ];
        let mut nodes = corners.to_vec();
        for &(a, b) in TET10_EDGES.iter() {
            nodes.push((corners[a] + corners[b]) * 0.5);
        }
        let mut m = Mesh {
            nodes,
            elements: vec![[0, 1, 2, 3, 4, 5, 6, 7, 8, 9]],
            ..Default::default()
        };
        if super::super::template::tet_volume6(&m.nodes, &[0, 1, 2, 3]) < 0.0 {
            m.elements[0] = [1, 0, 2, 3, 4, 6, 5, 8, 7, 9];
        }
        m
    }

    #[test]
    fn regular_tet_is_perfect() {
        let m = regular_tet();
        let q = mesh_quality(&m);
        assert!((q.min_jacobian_ratio - 1.0).abs() < 1e-12);
        assert!((q.min_dihedral_deg - 70.528_779_365_509_31).abs() < 1e-9);
        assert!(q.flagged.is_empty());
    }

    #[test]
    fn swapped_nodes_are_flagged() {
        let mut m = regular_tet();
        m.elements[0].swap(0, 1);
        let q = mesh_quality(&m);
        assert_eq!(q.flagged, vec![0]);
        assert!(q.min_jacobian_ratio < 0.0);
    }

    #[test]
    fn generated_bending1_has_no_flags() {
        let mut s = ActuatorSpec::bending1();
        s.axial_aspect = 3.0;
        let m = generate_mesh(&s, 1.5).unwrap();
        let q = mesh_quality(&m);
        assert!(q.flagged.is_empty(), "{q}");
    }
}
