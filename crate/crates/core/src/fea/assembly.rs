//! Element kernels and global assembly of internal force, tangent and
//! stored energy.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use rayon::prelude::*;

use super::sparse::{Pattern, SparseMatrix};
use super::FeaError;
use crate::material::{pk2_stress, strain_energy, stress_and_tangent, DeformationState, HyperelasticParams};
use crate::mesh::shape::tet_quadrature;
use crate::mesh::Mesh;

type Vec30 = SVector<f64, 30>;
type Mat30 = SMatrix<f64, 30, 30>;
type B6x30 = SMatrix<f64, 6, 30>;

/// Elements are evaluated in chunks of this size; each chunk may be computed
/// in parallel, but is reduced in element order.
const CHUNK: usize = 512;

/// Mesh plus material with reference shape-function gradients cached per
/// quadrature point.
pub struct Model<'m> {
    pub mesh: &'m Mesh,
    pub params: HyperelasticParams,
    /// `dN_a/dX` at element `e`, point `q`: `grads[4*e+q][a]`.
    grads: Vec<[Vector3<f64>; 10]>,
    /// Quadrature weight times reference Jacobian determinant.
    wdet: Vec<f64>,
}

impl<'m> Model<'m> {
    pub fn new(mesh: &'m Mesh, params: HyperelasticParams) -> Result<Self, FeaError> {
        params.validate_positive()?;
        mesh.check_indices()?;
        let qp = tet_quadrature();
        let mut grads = Vec::with_capacity(4 * mesh.elements.len());
        let mut wdet = Vec::with_capacity(4 * mesh.elements.len());
        for (e, conn) in mesh.elements.iter().enumerate() {
            for q in &qp {
                let j = mesh.jacobian(conn, q.xi);
                let det = j.determinant();
                if !(det > 0.0) {
                    return Err(FeaError::InvertedElement { element: e, det });
                }
                let jinv_t = j.try_inverse().expect("positive determinant").transpose();
                let g = crate::mesh::shape::tet10_gradients(q.xi);
                let mut ga = [Vector3::zeros(); 10];
                for a in 0..10 {
                    ga[a] = jinv_t * Vector3::new(g[a][0], g[a][1], g[a][2]);
                }
                grads.push(ga);
                wdet.push(q.weight * det);
            }
        }
        Ok(Model {
            mesh,
            params,
            grads,
            wdet,
        })
    }

    pub fn dof_count(&self) -> usize {
        3 * self.mesh.nodes.len()
    }

    fn check_len(&self, u: &[f64]) -> Result<(), FeaError> {
        if u.len() != self.dof_count() {
            return Err(FeaError::DimensionMismatch {
                got: u.len(),
                expected: self.dof_count(),
            });
        }
        Ok(())
    }

    fn element_displacements(&self, e: usize, u: &[f64]) -> [Vector3<f64>; 10] {
        let conn = &self.mesh.elements[e];
        let mut ue = [Vector3::zeros(); 10];
        for a in 0..10 {
            let n = conn[a];
            ue[a] = Vector3::new(u[3 * n], u[3 * n + 1], u[3 * n + 2]);
        }
        ue
    }

    /// Deformation gradient at element `e`, quadrature point `q`.
    pub fn deformation_gradient(&self, e: usize, q: usize, u: &[f64]) -> Matrix3<f64> {
        let ue = self.element_displacements(e, u);
        grad_f(&self.grads[4 * e + q], &ue)
    }

    /// Reference volume weight of quadrature point `q` of element `e`.
    pub fn point_weight(&self, e: usize, q: usize) -> f64 {
        self.wdet[4 * e + q]
    }

    fn state(&self, e: usize, f: Matrix3<f64>) -> Result<DeformationState, FeaError> {
        DeformationState::new(f).map_err(|_| FeaError::InvertedElement {
            element: e,
            det: f.determinant(),
        })
    }

    pub fn element_energy(&self, e: usize, u: &[f64]) -> Result<f64, FeaError> {
        let ue = self.element_displacements(e, u);
        let mut w = 0.0;
        for q in 0..4 {
            let f = grad_f(&self.grads[4 * e + q], &ue);
            let state = self.state(e, f)?;
            w += self.wdet[4 * e + q] * strain_energy(&self.params, &state)?;
        }
        Ok(w)
    }

    /// Element internal force and, optionally, tangent.
    pub fn element_force_tangent(&self, e: usize, u: &[f64], with_tangent: bool) -> Result<(Vec30, Option<Mat30>), FeaError> {
        let ue = self.element_displacements(e, u);
        let mut fe = Vec30::zeros();
        let mut ke = if with_tangent { Some(Mat30::zeros()) } else { None };
        for q in 0..4 {
            let g = &self.grads[4 * e + q];
            let w = self.wdet[4 * e + q];
            let f = grad_f(g, &ue);
            if !(f.determinant() > 0.0) {
                return Err(FeaError::InvertedElement {
                    element: e,
                    det: f.determinant(),
                });
            }
            let (s, d) = match ke {
                Some(_) => {
                    let (_, s, d) = stress_and_tangent(&self.params, &f).map_err(|_| FeaError::InvertedElement {
                        element: e,
                        det: f.determinant(),
                    })?;
                    (s, Some(d))
                }
                None => (pk2_stress(&self.params, &self.state(e, f)?)?, None),
            };
            let p = f * s;
            for a in 0..10 {
                let fa = p * g[a] * w;
                fe[3 * a] += fa.x;
                fe[3 * a + 1] += fa.y;
                fe[3 * a + 2] += fa.z;
            }
            if let (Some(k), Some(d)) = (ke.as_mut(), d) {
                let b = strain_displacement(&f, g);
                let db = d.voigt() * b;
                *k += b.transpose() * db * w;
                for a in 0..10 {
                    let sga = s * g[a];
                    for bb in 0..10 {
                        let gs = sga.dot(&g[bb]) * w;
                        for i in 0..3 {
                            k[(3 * a + i, 3 * bb + i)] += gs;
                        }
                    }
                }
            }
        }
        Ok((fe, ke))
    }

    pub fn energy(&self, u: &[f64]) -> Result<f64, FeaError> {
        self.check_len(u)?;
        let mut total = 0.0;
        for e in 0..self.mesh.elements.len() {
            total += self.element_energy(e, u)?;
        }
        Ok(total)
    }

    pub fn internal_force(&self, u: &[f64]) -> Result<Vec<f64>, FeaError> {
        self.check_len(u)?;
        let mut out = vec![0.0; self.dof_count()];
        self.for_each_chunk(u, false, |e, fe, _| {
            for (a, &n) in self.mesh.elements[e].iter().enumerate() {
                for i in 0..3 {
                    out[3 * n + i] += fe[3 * a + i];
                }
            }
        })?;
        Ok(out)
    }

    /// Internal force and tangent in one pass, assembled into the pattern.
    pub fn force_and_tangent(&self, pattern: &Pattern, u: &[f64]) -> Result<(Vec<f64>, SparseMatrix), FeaError> {
        self.check_len(u)?;
        let mut force = vec![0.0; self.dof_count()];
        let mut k = pattern.zero_matrix();
        self.for_each_chunk(u, true, |e, fe, ke| {
            let conn = &self.mesh.elements[e];
            for (a, &n) in conn.iter().enumerate() {
                for i in 0..3 {
                    force[3 * n + i] += fe[3 * a + i];
                }
            }
            // nalgebra is column-major; the element block is symmetric
            let ke = ke.expect("tangent requested");
            pattern.scatter::<10>(&mut k.values, conn, pattern.element_slots(e), ke.as_slice());
        })?;
        Ok((force, k))
    }

    fn for_each_chunk(
        &self,
        u: &[f64],
        with_tangent: bool,
        mut sink: impl FnMut(usize, &Vec30, Option<&Mat30>),
    ) -> Result<(), FeaError> {
        let ne = self.mesh.elements.len();
        let mut start = 0;
        while start < ne {
            let end = (start + CHUNK).min(ne);
            let results: Vec<Result<(Vec30, Option<Mat30>), FeaError>> = (start..end)
                .into_par_iter()
                .map(|e| self.element_force_tangent(e, u, with_tangent))
                .collect();
            for (offset, r) in results.into_iter().enumerate() {
                let (fe, ke) = r?;
                sink(start + offset, &fe, ke.as_ref());
            }
            start = end;
        }
        Ok(())
    }
}

fn grad_f(g: &[Vector3<f64>; 10], ue: &[Vector3<f64>; 10]) -> Matrix3<f64> {
    let mut f = Matrix3::identity();
    for a in 0..10 {
        f += ue[a] * g[a].transpose();
    }
    f
}

/// Maps nodal displacement increments to Green-Lagrange strain increments in
/// Voigt order (11, 22, 33, 12, 23, 13) with engineering shear.
fn strain_displacement(f: &Matrix3<f64>, g: &[Vector3<f64>; 10]) -> B6x30 {
    let mut b = B6x30::zeros();
    for a in 0..10 {
        let ga = &g[a];
        for i in 0..3 {
            let c = 3 * a + i;
            b[(0, c)] = f[(i, 0)] * ga[0];
            b[(1, c)] = f[(i, 1)] * ga[1];
            b[(2, c)] = f[(i, 2)] * ga[2];
            b[(3, c)] = f[(i, 0)] * ga[1] + f[(i, 1)] * ga[0];
            b[(4, c)] = f[(i, 1)] * ga[2] + f[(i, 2)] * ga[1];
            b[(5, c)] = f[(i, 0)] * ga[2] + f[(i, 2)] * ga[0];
        }
    }
    b
}

/// Total stored energy, N·mm.
pub fn total_energy(mesh: &Mesh, params: &HyperelasticParams, u: &[f64]) -> Result<f64, FeaError> {
    Model::new(mesh, *params)?.energy(u)
}

/// Nodal internal force vector, N.
pub fn internal_force(mesh: &Mesh, params: &HyperelasticParams, u: &[f64]) -> Result<Vec<f64>, FeaError> {
    Model::new(mesh, *params)?.internal_force(u)
}

/// Material plus geometric tangent of the internal force.
pub fn tangent_stiffness(mesh: &Mesh, params: &HyperelasticParams, u: &[f64]) -> Result<SparseMatrix, FeaError> {
    let model = Model::new(mesh, *params)?;
    let pattern = Pattern::new(mesh);
    Ok(model.force_and_tangent(&pattern, u)?.1)
}
