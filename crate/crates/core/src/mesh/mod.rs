//! Ten-node tetrahedral meshes, actuator archetype geometry and the ASCII
//! mesh format.

pub mod actuator;
pub mod io;
pub mod quality;
pub mod shape;
pub mod template;

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

pub use actuator::{generate_mesh, ActuatorKind, ActuatorSpec, WallProfile};
pub use io::{load_mesh, parse_mesh, save_mesh, write_mesh};
pub use quality::{mesh_quality, QualityReport, FLAG_JACOBIAN_RATIO};

pub type Point = Vector3<f64>;

/// Node set holding the constrained inlet end.
pub const FIXED_SET: &str = "fixed";
/// Node set on the free end face.
pub const TIP_SET: &str = "tip";
/// Face set lining the pressurized chamber.
pub const CAVITY_SET: &str = "cavity";

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("invalid actuator spec: {0}")]
    InvalidSpec(String),
    #[error("template produced an inverted element {element} (det = {det:e})")]
    InvertedElement { element: usize, det: f64 },
    #[error("element {element} references node {node} but the mesh has {count} nodes")]
    IndexOutOfRange {
        element: usize,
        node: usize,
        count: usize,
    },
    #[error("{kind} set '{name}' references node {node} but the mesh has {count} nodes")]
    SetIndexOutOfRange {
        kind: &'static str,
        name: String,
        node: usize,
        count: usize,
    },
    #[error("unknown {kind} set '{name}'")]
    UnknownSet { kind: &'static str, name: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Quadratic tetrahedral mesh with named node and face sets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mesh {
    pub nodes: Vec<Point>,
    pub elements: Vec<[usize; 10]>,
    pub node_sets: BTreeMap<String, Vec<usize>>,
    pub face_sets: BTreeMap<String, Vec<[usize; 6]>>,
}

impl Mesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn node_set(&self, name: &str) -> Result<&[usize], MeshError> {
        self.node_sets
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| MeshError::UnknownSet {
                kind: "node",
                name: name.to_string(),
            })
    }

    pub fn face_set(&self, name: &str) -> Result<&[[usize; 6]], MeshError> {
        self.face_sets
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| MeshError::UnknownSet {
                kind: "face",
                name: name.to_string(),
            })
    }

    /// Checks index ranges and that every element has a positive Jacobian at
    /// its quadrature points.
    pub fn validate(&self) -> Result<(), MeshError> {
        self.check_indices()?;
        let qp = shape::tet_quadrature();
        for (e, conn) in self.elements.iter().enumerate() {
            for q in &qp {
                let det = self.jacobian(conn, q.xi).determinant();
                if !(det > 0.0) {
                    return Err(MeshError::InvertedElement { element: e, det });
                }
            }
        }
        Ok(())
    }

    pub fn check_indices(&self) -> Result<(), MeshError> {
        let count = self.nodes.len();
        for (e, conn) in self.elements.iter().enumerate() {
            if let Some(&node) = conn.iter().find(|&&n| n >= count) {
                return Err(MeshError::IndexOutOfRange {
                    element: e,
                    node,
                    count,
                });
            }
        }
        for (name, ids) in &self.node_sets {
            if let Some(&node) = ids.iter().find(|&&n| n >= count) {
                return Err(MeshError::SetIndexOutOfRange {
                    kind: "node",
                    name: name.clone(),
                    node,
                    count,
                });
            }
        }
        for (name, faces) in &self.face_sets {
            if let Some(&node) = faces.iter().flatten().find(|&&n| n >= count) {
                return Err(MeshError::SetIndexOutOfRange {
                    kind: "face",
                    name: name.clone(),
                    node,
                    count,
                });
            }
        }
        Ok(())
    }

    /// Reference Jacobian `dX/dξ` of an element at natural coordinates.
    pub fn jacobian(&self, conn: &[usize; 10], xi: [f64; 3]) -> Matrix3<f64> {
        let g = shape::tet10_gradients(xi);
        let mut j = Matrix3::zeros();
        for (a, &n) in conn.iter().enumerate() {
            let x = &self.nodes[n];
            for r in 0..3 {
                for c in 0..3 {
                    j[(r, c)] += x[r] * g[a][c];
                }
            }
        }
        j
    }

    /// Total reference volume.
    pub fn volume(&self) -> f64 {
        let qp = shape::tet_quadrature();
        self.elements
            .iter()
            .map(|conn| {
                qp.iter()
                    .map(|q| q.weight * self.jacobian(conn, q.xi).determinant())
                    .sum::<f64>()
            })
            .sum()
    }

    /// Area-weighted normal sum and total area of a face set, evaluated on the
    /// given nodal positions (reference positions when `positions` is `None`).
    pub fn face_set_normal_sum(&self, name: &str, positions: Option<&[Point]>) -> Result<(Point, f64), MeshError> {
        let faces = self.face_set(name)?;
        let x = positions.unwrap_or(&self.nodes);
        let mut sum = Point::zeros();
        let mut area = 0.0;
        for face in faces {
            for q in shape::tri_quadrature() {
                let g = shape::tri6_gradients([q.xi[0], q.xi[1]]);
                let mut t1 = Point::zeros();
                let mut t2 = Point::zeros();
                for (a, &n) in face.iter().enumerate() {
                    t1 += x[n] * g[a][0];
                    t2 += x[n] * g[a][1];
                }
                let n = t1.cross(&t2);
                sum += n * q.weight;
                area += n.norm() * q.weight;
            }
        }
        Ok((sum, area))
    }

    /// A face set is closed when its area-weighted normals cancel.
    pub fn face_set_is_closed(&self, name: &str) -> Result<bool, MeshError> {
        let (sum, area) = self.face_set_normal_sum(name, None)?;
        Ok(sum.norm() <= 1e-8 * area)
    }

    /// Volume enclosed by a closed face set whose normals point into the
    /// enclosed region's complement (away from the solid). Positive for a
    /// cavity lined with solid-outward faces.
    pub fn enclosed_volume(&self, name: &str, positions: Option<&[Point]>) -> Result<f64, MeshError> {
        let faces = self.face_set(name)?;
        let x = positions.unwrap_or(&self.nodes);
        let mut vol = 0.0;
        for face in faces {
            for q in shape::tri_quadrature() {
                let n = shape::tri6_values([q.xi[0], q.xi[1]]);
                let g = shape::tri6_gradients([q.xi[0], q.xi[1]]);
                let mut p = Point::zeros();
                let mut t1 = Point::zeros();
                let mut t2 = Point::zeros();
                for (a, &id) in face.iter().enumerate() {
                    p += x[id] * n[a];
                    t1 += x[id] * g[a][0];
                    t2 += x[id] * g[a][1];
                }
                vol -= p.dot(&t1.cross(&t2)) * q.weight / 3.0;
            }
        }
        Ok(vol)
    }

    /// Axis-aligned bounding box of the reference configuration.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::repeat(f64::INFINITY);
        let mut hi = Point::repeat(f64::NEG_INFINITY);
        for p in &self.nodes {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (lo, hi)
    }

    /// Applies an affine map `x ↦ R x + t` to all nodes.
    pub fn transformed(&self, rotation: &Matrix3<f64>, translation: &Point) -> Mesh {
        let mut out = self.clone();
        for p in &mut out.nodes {
            *p = rotation * *p + translation;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_sets_are_reported() {
        let m = Mesh::default();
        assert!(matches!(m.node_set("x"), Err(MeshError::UnknownSet { .. })));
        assert!(matches!(m.face_set("x"), Err(MeshError::UnknownSet { .. })));
    }

    #[test]
    fn out_of_range_set_index_is_caught() {
        let mut m = Mesh::default();
        m.nodes.push(Point::zeros());
        m.node_sets.insert("a".into(), vec![0, 3]);
        assert!(matches!(
            m.check_indices(),
            Err(MeshError::SetIndexOutOfRange { node: 3, .. })
        ));
    }
}
