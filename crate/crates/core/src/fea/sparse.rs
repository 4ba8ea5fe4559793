//! Compressed-column storage with a node-block pattern, and the direct
//! solver wrapper.

use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::Mat;
use faer::prelude::Solve;
use nalgebra::DMatrix;

use super::FeaError;
use crate::mesh::Mesh;

/// Square sparse matrix in compressed-column form; row indices are sorted
/// within each column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub n: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseMatrix {
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let range = self.col_ptr[col]..self.col_ptr[col + 1];
        match self.row_idx[range.clone()].binary_search(&row) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (c, &xc) in x.iter().enumerate().take(self.n) {
            for p in self.col_ptr[c]..self.col_ptr[c + 1] {
                y[self.row_idx[p]] += self.values[p] * xc;
            }
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for c in 0..self.n {
            for p in self.col_ptr[c]..self.col_ptr[c + 1] {
                m[(self.row_idx[p], c)] += self.values[p];
            }
        }
        m
    }

    fn symbolic(&self) -> SymbolicSparseColMatRef<'_, usize> {
        SymbolicSparseColMatRef::new_checked(self.n, self.n, &self.col_ptr, None, &self.row_idx)
    }
}

/// Node-block sparsity pattern over all `3N` dofs. Every pair of nodes that
/// share an element or a face owns a dense 3×3 block.
#[derive(Debug, Clone)]
pub struct Pattern {
    pub n: usize,
    adjacency: Vec<Vec<usize>>,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    /// Per element, the slot of `conn[a]` in `adjacency[conn[b]]` at `a*10+b`.
    element_slots: Vec<[u32; 100]>,
}

impl Pattern {
    pub fn new(mesh: &Mesh) -> Self {
        let nn = mesh.nodes.len();
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); nn];
        for conn in &mesh.elements {
            for &a in conn {
                adjacency[a].extend_from_slice(conn);
            }
        }
        for faces in mesh.face_sets.values() {
            for f in faces {
                for &a in f {
                    adjacency[a].extend_from_slice(f);
                }
            }
        }
        for (n, adj) in adjacency.iter_mut().enumerate() {
            adj.push(n);
            adj.sort_unstable();
            adj.dedup();
        }
        let n = 3 * nn;
        let mut col_ptr = Vec::with_capacity(n + 1);
        col_ptr.push(0);
        let mut row_idx = Vec::new();
        for adj in &adjacency {
            for _ in 0..3 {
                for &m in adj {
                    row_idx.extend_from_slice(&[3 * m, 3 * m + 1, 3 * m + 2]);
                }
                col_ptr.push(row_idx.len());
            }
        }
        let mut pattern = Pattern {
            n,
            adjacency,
            col_ptr,
            row_idx,
            element_slots: Vec::new(),
        };
        pattern.element_slots = mesh.elements.iter().map(|c| pattern.slots(c)).collect();
        pattern
    }

    fn slot(&self, a: usize, b: usize) -> usize {
        self.adjacency[b]
            .binary_search(&a)
            .expect("node pair missing from pattern")
    }

    fn slots<const M: usize, const MM: usize>(&self, conn: &[usize; M]) -> [u32; MM] {
        let mut out = [0u32; MM];
        for (a, &na) in conn.iter().enumerate() {
            for (b, &nb) in conn.iter().enumerate() {
                out[a * M + b] = self.slot(na, nb) as u32;
            }
        }
        out
    }

    pub fn face_slots(&self, faces: &[[usize; 6]]) -> Vec<[u32; 36]> {
        faces.iter().map(|f| self.slots(f)).collect()
    }

    pub fn zero_matrix(&self) -> SparseMatrix {
        SparseMatrix {
            n: self.n,
            col_ptr: self.col_ptr.clone(),
            row_idx: self.row_idx.clone(),
            values: vec![0.0; self.row_idx.len()],
        }
    }

    #[inline]
    fn position(&self, slot: u32, row_node_comp: usize, col_node: usize, col_comp: usize) -> usize {
        self.col_ptr[3 * col_node + col_comp] + 3 * slot as usize + row_node_comp
    }

    /// Adds a dense element block (`3M × 3M`, row-major) into `values`.
    pub fn scatter<const M: usize>(&self, values: &mut [f64], conn: &[usize; M], slots: &[u32], block: &[f64]) {
        let m3 = 3 * M;
        for (b, &nb) in conn.iter().enumerate() {
            for j in 0..3 {
                let col = 3 * b + j;
                for a in 0..M {
                    let base = self.position(slots[a * M + b], 0, nb, j);
                    for i in 0..3 {
                        values[base + i] += block[(3 * a + i) * m3 + col];
                    }
                }
            }
        }
    }

    pub fn element_slots(&self, e: usize) -> &[u32; 100] {
        &self.element_slots[e]
    }

    /// Value positions of row `dof` (one per neighbouring column).
    pub fn row_positions(&self, dof: usize) -> Vec<usize> {
        let node = dof / 3;
        let comp = dof % 3;
        let mut out = Vec::with_capacity(3 * self.adjacency[node].len());
        for &m in &self.adjacency[node] {
            let slot = self.slot(node, m) as u32;
            for j in 0..3 {
                out.push(self.position(slot, comp, m, j));
            }
        }
        out
    }

    pub fn col_range(&self, dof: usize) -> std::ops::Range<usize> {
        self.col_ptr[dof]..self.col_ptr[dof + 1]
    }

    pub fn diagonal_position(&self, dof: usize) -> usize {
        let node = dof / 3;
        let slot = self.slot(node, node) as u32;
        self.position(slot, dof % 3, node, dof % 3)
    }
}

/// Sparse LU with the symbolic analysis computed once and reused for every
/// matrix sharing the pattern.
pub struct DirectSolver {
    symbolic: Option<SymbolicLu<usize>>,
}

impl Default for DirectSolver {
    fn default() -> Self {
        Self::new()
    }
}

impl DirectSolver {
    pub fn new() -> Self {
        DirectSolver { symbolic: None }
    }

    /// Solves `a x = b`.
    pub fn solve(&mut self, a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>, FeaError> {
        if self.symbolic.is_none() {
            let sym = SymbolicLu::try_new(a.symbolic()).map_err(|e| FeaError::LinearSolve(format!("{e:?}")))?;
            self.symbolic = Some(sym);
        }
        let symbolic = self.symbolic.clone().expect("symbolic factorization present");
        let mat = SparseColMatRef::new(a.symbolic(), &a.values);
        let lu = Lu::try_new_with_symbolic(symbolic, mat).map_err(|e| FeaError::LinearSolve(format!("{e:?}")))?;
        let mut rhs = Mat::from_fn(a.n, 1, |i, _| b[i]);
        lu.solve_in_place(rhs.as_mut());
        let x: Vec<f64> = (0..a.n).map(|i| rhs[(i, 0)]).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(FeaError::LinearSolve("non-finite solution".into()));
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::template::block_mesh;

    #[test]
    fn pattern_covers_element_blocks() {
        let m = block_mesh(1.0, 1.0, 1.0, 1.0).unwrap();
        let p = Pattern::new(&m);
        let mut values = vec![0.0; p.row_idx.len()];
        let block: Vec<f64> = (0..900).map(|k| k as f64).collect();
        p.scatter::<10>(&mut values, &m.elements[0], p.element_slots(0), &block);
        let mat = SparseMatrix {
            n: p.n,
            col_ptr: p.col_ptr.clone(),
            row_idx: p.row_idx.clone(),
            values,
        };
        let c = &m.elements[0];
        for a in 0..10 {
            for b in 0..10 {
                for i in 0..3 {
                    for j in 0..3 {
                        let expect = block[(3 * a + i) * 30 + 3 * b + j];
                        assert_eq!(mat.get(3 * c[a] + i, 3 * c[b] + j), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn direct_solver_solves_small_unsymmetric_system() {
        let a = SparseMatrix {
            n: 3,
            col_ptr: vec![0, 2, 4, 6],
            row_idx: vec![0, 1, 1, 2, 0, 2],
            values: vec![4.0, 1.0, 3.0, -1.0, 2.0, 5.0],
        };
        let x_true = [1.0, -2.0, 0.5];
        let b = a.matvec(&x_true);
        let x = DirectSolver::new().solve(&a, &b).unwrap();
        for (u, v) in x.iter().zip(x_true) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}
