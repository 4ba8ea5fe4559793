//! Structured hexahedral templates promoted to ten-node tetrahedra.
//!
//! A template is a tensor-product grid in logical coordinates, a cell
//! classifier and a map from logical to physical space. Every solid hex is
//! split into six tetrahedra sharing the cell's main diagonal, which keeps
//! neighbouring cells conforming. Mid-edge nodes sit at straight-edge
//! midpoints of the mapped corners.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::shape::{TET10_EDGES, TET_FACES};
use super::{Mesh, MeshError, Point, CAVITY_SET};

/// Classification of a grid cell. Queries outside the grid use signed
/// indices so that templates can mark exterior neighbours as cavities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Solid,
    Cavity,
    Empty,
}

type CellFn<'a> = Box<dyn Fn(isize, isize, isize) -> CellKind + 'a>;
type MapFn<'a> = Box<dyn Fn(f64, f64, f64) -> Point + 'a>;
type TagFn<'a> = Box<dyn Fn(usize, usize, usize) -> Vec<&'static str> + 'a>;

pub struct StructuredGrid<'a> {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub zs: Vec<f64>,
    cell: CellFn<'a>,
    map: MapFn<'a>,
    tags: TagFn<'a>,
    cavity_name: String,
}

/// Kuhn paths through the unit cube, each with its permutation parity.
const KUHN: [([usize; 3], bool); 6] = [
    ([0, 1, 2], true),
    ([1, 2, 0], true),
    ([2, 0, 1], true),
    ([0, 2, 1], false),
    ([2, 1, 0], false),
    ([1, 0, 2], false),
];

impl<'a> StructuredGrid<'a> {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, zs: Vec<f64>) -> Self {
        let (nx, ny, nz) = (xs.len() as isize - 1, ys.len() as isize - 1, zs.len() as isize - 1);
        Self {
            xs,
            ys,
            zs,
            cell: Box::new(move |i, j, k| {
                if i < 0 || j < 0 || k < 0 || i >= nx || j >= ny || k >= nz {
                    CellKind::Empty
                } else {
                    CellKind::Solid
                }
            }),
            map: Box::new(|x, y, z| Point::new(x, y, z)),
            tags: Box::new(|_, _, _| Vec::new()),
            cavity_name: CAVITY_SET.to_string(),
        }
    }

    /// Cell classifier. It is only consulted for in-range cells and for the
    /// immediate out-of-range neighbours of boundary faces.
    pub fn with_cells(mut self, f: impl Fn(isize, isize, isize) -> CellKind + 'a) -> Self {
        self.cell = Box::new(f);
        self
    }

    pub fn with_map(mut self, f: impl Fn(f64, f64, f64) -> Point + 'a) -> Self {
        self.map = Box::new(f);
        self
    }

    /// Node-set membership of a logical corner. Mid-edge nodes join a set
    /// when both edge ends belong to it.
    pub fn with_tags(mut self, f: impl Fn(usize, usize, usize) -> Vec<&'static str> + 'a) -> Self {
        self.tags = Box::new(f);
        self
    }

    pub fn with_cavity_name(mut self, name: &str) -> Self {
        self.cavity_name = name.to_string();
        self
    }

    fn dims(&self) -> (usize, usize, usize) {
        (self.xs.len() - 1, self.ys.len() - 1, self.zs.len() - 1)
    }

    pub fn generate(&self) -> Result<Mesh, MeshError> {
        let (nx, ny, nz) = self.dims();
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(MeshError::InvalidSpec("structured grid needs at least one cell per axis".into()));
        }
        let is_solid = |i: usize, j: usize, k: usize| (self.cell)(i as isize, j as isize, k as isize) == CellKind::Solid;
        let corner_index = |i: usize, j: usize, k: usize| (k * (ny + 1) + j) * (nx + 1) + i;

        let mut used = vec![false; (nx + 1) * (ny + 1) * (nz + 1)];
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    if is_solid(i, j, k) {
                        for (di, dj, dk) in cube_corners() {
                            used[corner_index(i + di, j + dj, k + dk)] = true;
                        }
                    }
                }
            }
        }

        let mut mesh = Mesh::default();
        let mut corner_id = vec![usize::MAX; used.len()];
        let mut logical: Vec<[usize; 3]> = Vec::new();
        let mut node_tags: Vec<Vec<&'static str>> = Vec::new();
        for k in 0..=nz {
            for j in 0..=ny {
                for i in 0..=nx {
                    let c = corner_index(i, j, k);
                    if used[c] {
                        corner_id[c] = mesh.nodes.len();
                        mesh.nodes.push((self.map)(self.xs[i], self.ys[j], self.zs[k]));
                        logical.push([i, j, k]);
                        node_tags.push((self.tags)(i, j, k));
                    }
                }
            }
        }
        let corner_count = mesh.nodes.len();

        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut cavity: Vec<[usize; 6]> = Vec::new();
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    if !is_solid(i, j, k) {
                        continue;
                    }
                    for (perm, even) in KUHN {
                        let mut off = [[0usize; 3]; 4];
                        off[3] = [1, 1, 1];
                        off[1][perm[0]] = 1;
                        off[2] = off[1];
                        off[2][perm[1]] = 1;
                        if !even {
                            off.swap(1, 2);
                        }
                        let mut corners = [0usize; 4];
                        for (v, o) in off.iter().enumerate() {
                            corners[v] = corner_id[corner_index(i + o[0], j + o[1], k + o[2])];
                        }
                        let element = mesh.elements.len();
                        let det = tet_volume6(&mesh.nodes, &corners);
                        if !(det > 0.0) {
                            return Err(MeshError::InvertedElement { element, det });
                        }
                        let mut conn = [0usize; 10];
                        conn[..4].copy_from_slice(&corners);
                        for (e, &(a, b)) in TET10_EDGES.iter().enumerate() {
                            let key = (corners[a].min(corners[b]), corners[a].max(corners[b]));
                            let id = *mid.entry(key).or_insert_with(|| {
                                let p = (mesh.nodes[key.0] + mesh.nodes[key.1]) * 0.5;
                                mesh.nodes.push(p);
                                let ta = &node_tags[key.0];
                                let tb = &node_tags[key.1];
                                let shared: Vec<&'static str> = ta.iter().filter(|t| tb.contains(t)).copied().collect();
                                node_tags.push(shared);
                                mesh.nodes.len() - 1
                            });
                            conn[4 + e] = id;
                        }
                        for face in TET_FACES {
                            let lc: [[usize; 3]; 3] = [
                                logical[corners[face[0]]],
                                logical[corners[face[1]]],
                                logical[corners[face[2]]],
                            ];
                            let Some(neighbour) = face_neighbour(&lc, [i, j, k]) else {
                                continue;
                            };
                            if (self.cell)(neighbour[0], neighbour[1], neighbour[2]) == CellKind::Cavity {
                                cavity.push(tri6_from_tet(&conn, face));
                            }
                        }
                        mesh.elements.push(conn);
                    }
                }
            }
        }
        debug_assert!(mesh.nodes.len() >= corner_count);

        let mut sets: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        for (n, tags) in node_tags.iter().enumerate() {
            for t in tags {
                sets.entry((*t).to_string()).or_default().insert(n);
            }
        }
        mesh.node_sets = sets.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect();
        if !cavity.is_empty() {
            mesh.face_sets.insert(self.cavity_name.clone(), cavity);
        }
        Ok(mesh)
    }
}

fn cube_corners() -> impl Iterator<Item = (usize, usize, usize)> {
    (0..8).map(|c| (c & 1, (c >> 1) & 1, (c >> 2) & 1))
}

/// Six times the signed volume of the corner tetrahedron.
pub fn tet_volume6(nodes: &[Point], c: &[usize; 4]) -> f64 {
    let a = nodes[c[1]] - nodes[c[0]];
    let b = nodes[c[2]] - nodes[c[0]];
    let d = nodes[c[3]] - nodes[c[0]];
    a.dot(&b.cross(&d))
}

/// When a tet face lies on a face of its hex cell, the neighbouring cell
/// across that hex face.
fn face_neighbour(lc: &[[usize; 3]; 3], cell: [usize; 3]) -> Option<[isize; 3]> {
    for axis in 0..3 {
        let v = lc[0][axis];
        if lc[1][axis] == v && lc[2][axis] == v {
            let mut n = [cell[0] as isize, cell[1] as isize, cell[2] as isize];
            if v == cell[axis] {
                n[axis] -= 1;
            } else {
                n[axis] += 1;
            }
            return Some(n);
        }
    }
    None
}

/// Six-node boundary triangle of a tet face, keeping the face orientation.
pub fn tri6_from_tet(conn: &[usize; 10], face: [usize; 3]) -> [usize; 6] {
    let edge_node = |a: usize, b: usize| -> usize {
        let (lo, hi) = (a.min(b), a.max(b));
        let e = TET10_EDGES
            .iter()
            .position(|&(p, q)| p == lo && q == hi)
            .expect("tet edge");
        conn[4 + e]
    };
    [
        conn[face[0]],
        conn[face[1]],
        conn[face[2]],
        edge_node(face[0], face[1]),
        edge_node(face[1], face[2]),
        edge_node(face[2], face[0]),
    ]
}

/// Grid lines covering `[lo, hi]` through every breakpoint, with spacing no
/// larger than `h`.
pub fn graded_lines(breaks: &[f64], h: f64) -> Vec<f64> {
    let mut b: Vec<f64> = breaks.to_vec();
    b.sort_by(|a, c| a.partial_cmp(c).expect("finite breakpoints"));
    b.dedup_by(|a, c| (*a - *c).abs() < 1e-9);
    let mut out = vec![b[0]];
    for w in b.windows(2) {
        let len = w[1] - w[0];
        let n = ((len / h) - 1e-9).ceil().max(1.0) as usize;
        for s in 1..=n {
            out.push(w[0] + len * s as f64 / n as f64);
        }
    }
    out
}

/// Solid rectangular block `[0,lx]×[0,ly]×[0,lz]` with node sets `fixed`
/// (z = 0), `tip` (z = lz) and `boundary` (every outer face).
pub fn block_mesh(lx: f64, ly: f64, lz: f64, h: f64) -> Result<Mesh, MeshError> {
    let xs = graded_lines(&[0.0, lx], h);
    let ys = graded_lines(&[0.0, ly], h);
    let zs = graded_lines(&[0.0, lz], h);
    let (nx, ny, nz) = (xs.len() - 1, ys.len() - 1, zs.len() - 1);
    StructuredGrid::new(xs, ys, zs)
        .with_tags(move |i, j, k| {
            let mut t = Vec::new();
            if k == 0 {
                t.push(super::FIXED_SET);
            }
            if k == nz {
                t.push(super::TIP_SET);
            }
            if i == 0 || j == 0 || k == 0 || i == nx || j == ny || k == nz {
                t.push("boundary");
            }
            t
        })
        .generate()
}

/// Plane-strain slab of a thick-walled cylinder: a quarter annulus
/// `inner ≤ r ≤ outer`, `0 ≤ θ ≤ π/2`, one element through the thickness
/// `h`. The bore is exposed as the face set `inner`.
///
/// Node sets: `sym_y` (θ = 0, restrain y), `sym_x` (θ = π/2, restrain x),
/// `ends` (both axial faces, restrain z) and `inner` (bore nodes).
pub fn cylinder_slab_mesh(inner: f64, outer: f64, h: f64) -> Result<Mesh, MeshError> {
    let rs = graded_lines(&[inner, outer], h);
    let arc = std::f64::consts::FRAC_PI_2 * inner;
    let n_theta = ((arc / h) - 1e-9).ceil().max(2.0) as usize;
    let thetas: Vec<f64> = (0..=n_theta)
        .map(|s| std::f64::consts::FRAC_PI_2 * s as f64 / n_theta as f64)
        .collect();
    let zs = vec![0.0, h];
    let (nr, nt) = (rs.len() - 1, n_theta);
    StructuredGrid::new(rs, thetas, zs)
        .with_cells(move |i, j, k| {
            if i < 0 && j >= 0 && (j as usize) < nt && k == 0 {
                CellKind::Cavity
            } else if i >= 0 && j >= 0 && k == 0 && (i as usize) < nr && (j as usize) < nt {
                CellKind::Solid
            } else {
                CellKind::Empty
            }
        })
        .with_map(|r, t, z| Point::new(r * t.cos(), r * t.sin(), z))
        .with_tags(move |i, j, _k| {
            let mut t = vec!["ends"];
            if j == 0 {
                t.push("sym_y");
            }
            if j == nt {
                t.push("sym_x");
            }
            if i == 0 {
                t.push("inner");
            }
            t
        })
        .with_cavity_name("inner")
        .generate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lines_hit_breakpoints() {
        let l = graded_lines(&[0.0, 1.5, 4.0], 1.0);
        let expected = [0.0, 0.75, 1.5, 1.5 + 2.5 / 3.0, 1.5 + 5.0 / 3.0, 4.0];
        assert_eq!(l.len(), expected.len());
        for (a, b) in l.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(l[2], 1.5);
    }

    #[test]
    fn unit_cube_counts_match_lattice() {
        // n cells per side: 6n³ tets; the tet10 nodes form the (2n+1)³ lattice.
        for n in 1..=3usize {
            let m = block_mesh(1.0, 1.0, 1.0, 1.0 / n as f64).unwrap();
            assert_eq!(m.element_count(), 6 * n.pow(3));
            assert_eq!(m.node_count(), (2 * n + 1).pow(3));
            m.validate().unwrap();
        }
    }

    #[test]
    fn block_volume_is_exact() {
        let m = block_mesh(2.0, 1.0, 3.0, 0.7).unwrap();
        assert!((m.volume() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn enclosed_cavity_face_set_is_closed() {
        // 3×3×3 block with the centre cell hollow
        let xs = vec![0.0, 1.0, 2.0, 3.0];
        let m = StructuredGrid::new(xs.clone(), xs.clone(), xs)
            .with_cells(|i, j, k| {
                if !(0..3).contains(&i) || !(0..3).contains(&j) || !(0..3).contains(&k) {
                    CellKind::Empty
                } else if (i, j, k) == (1, 1, 1) {
                    CellKind::Cavity
                } else {
                    CellKind::Solid
                }
            })
            .generate()
            .unwrap();
        assert_eq!(m.element_count(), 26 * 6);
        assert_eq!(m.face_set(CAVITY_SET).unwrap().len(), 12);
        assert!(m.face_set_is_closed(CAVITY_SET).unwrap());
        assert!((m.enclosed_volume(CAVITY_SET, None).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cylinder_slab_sets() {
        let m = cylinder_slab_mesh(5.0, 10.0, 1.0).unwrap();
        m.validate().unwrap();
        let inner = m.node_set("inner").unwrap();
        for &n in inner {
            let p = m.nodes[n];
            assert!((p.x.hypot(p.y) - 5.0).abs() < 0.05);
        }
        assert!(!m.face_set("inner").unwrap().is_empty());
        for &n in m.node_set("sym_x").unwrap() {
            assert!(m.nodes[n].x.abs() < 1e-12);
        }
    }
}
