//! Quadratic tetrahedron and triangle shape functions and quadrature rules.
//!
//! Node ordering for the 10-node tetrahedron: corners `0..4`, then mid-edge
//! nodes on edges `(0,1) (1,2) (0,2) (0,3) (1,3) (2,3)`.
//! The 6-node triangle uses corners `0..3` then edges `(0,1) (1,2) (2,0)`.

/// Local corner pairs of the tet10 mid-edge nodes.
pub const TET10_EDGES: [(usize, usize); 6] = [(0, 1), (1, 2), (0, 2), (0, 3), (1, 3), (2, 3)];

/// Local corner pairs of the tri6 mid-edge nodes.
pub const TRI6_EDGES: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

/// Tet faces as local corner triples with outward orientation for a
/// positively oriented tetrahedron.
pub const TET_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];

/// A quadrature point in natural coordinates with its weight.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub xi: [f64; 3],
    pub weight: f64,
}

/// Four-point rule on the reference tetrahedron (exact for degree 2).
pub fn tet_quadrature() -> [QuadPoint; 4] {
    let a = 0.585_410_196_624_968_5;
    let b = 0.138_196_601_125_010_5;
    let w = 1.0 / 24.0;
    [
        QuadPoint { xi: [b, b, b], weight: w },
        QuadPoint { xi: [a, b, b], weight: w },
        QuadPoint { xi: [b, a, b], weight: w },
        QuadPoint { xi: [b, b, a], weight: w },
    ]
}

/// Seven-point rule on the reference triangle (exact for degree 5).
/// Natural coordinates are `(ξ, η)`; the third entry is unused.
pub fn tri_quadrature() -> [QuadPoint; 7] {
    let s15 = 15f64.sqrt();
    let a1 = (6.0 - s15) / 21.0;
    let b1 = (9.0 + 2.0 * s15) / 21.0;
    let a2 = (6.0 + s15) / 21.0;
    let b2 = (9.0 - 2.0 * s15) / 21.0;
    let w0 = 9.0 / 80.0;
    let w1 = (155.0 - s15) / 2400.0;
    let w2 = (155.0 + s15) / 2400.0;
    [
        QuadPoint { xi: [1.0 / 3.0, 1.0 / 3.0, 0.0], weight: w0 },
        QuadPoint { xi: [a1, a1, 0.0], weight: w1 },
        QuadPoint { xi: [b1, a1, 0.0], weight: w1 },
        QuadPoint { xi: [a1, b1, 0.0], weight: w1 },
        QuadPoint { xi: [a2, a2, 0.0], weight: w2 },
        QuadPoint { xi: [b2, a2, 0.0], weight: w2 },
        QuadPoint { xi: [a2, b2, 0.0], weight: w2 },
    ]
}

/// Tet10 shape function values at natural coordinates `(ξ, η, ζ)`.
pub fn tet10_values(xi: [f64; 3]) -> [f64; 10] {
    let l = [1.0 - xi[0] - xi[1] - xi[2], xi[0], xi[1], xi[2]];
    let mut n = [0.0; 10];
    for i in 0..4 {
        n[i] = l[i] * (2.0 * l[i] - 1.0);
    }
    for (e, &(i, j)) in TET10_EDGES.iter().enumerate() {
        n[4 + e] = 4.0 * l[i] * l[j];
    }
    n
}

/// Tet10 shape function derivatives with respect to `(ξ, η, ζ)`.
pub fn tet10_gradients(xi: [f64; 3]) -> [[f64; 3]; 10] {
    let l = [1.0 - xi[0] - xi[1] - xi[2], xi[0], xi[1], xi[2]];
    // dL_i / dξ_k
    let dl: [[f64; 3]; 4] = [
        [-1.0, -1.0, -1.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
    ];
    let mut g = [[0.0; 3]; 10];
    for i in 0..4 {
        for k in 0..3 {
            g[i][k] = (4.0 * l[i] - 1.0) * dl[i][k];
        }
    }
    for (e, &(i, j)) in TET10_EDGES.iter().enumerate() {
        for k in 0..3 {
            g[4 + e][k] = 4.0 * (dl[i][k] * l[j] + l[i] * dl[j][k]);
        }
    }
    g
}

/// Tri6 shape function values at `(ξ, η)`.
pub fn tri6_values(xi: [f64; 2]) -> [f64; 6] {
    let l = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
    let mut n = [0.0; 6];
    for i in 0..3 {
        n[i] = l[i] * (2.0 * l[i] - 1.0);
    }
    for (e, &(i, j)) in TRI6_EDGES.iter().enumerate() {
        n[3 + e] = 4.0 * l[i] * l[j];
    }
    n
}

/// Tri6 shape function derivatives with respect to `(ξ, η)`.
pub fn tri6_gradients(xi: [f64; 2]) -> [[f64; 2]; 6] {
    let l = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
    let dl: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    let mut g = [[0.0; 2]; 6];
    for i in 0..3 {
        for k in 0..2 {
            g[i][k] = (4.0 * l[i] - 1.0) * dl[i][k];
        }
    }
    for (e, &(i, j)) in TRI6_EDGES.iter().enumerate() {
        for k in 0..2 {
            g[3 + e][k] = 4.0 * (dl[i][k] * l[j] + l[i] * dl[j][k]);
        }
    }
    g
}

/// Natural coordinates of the ten tet nodes.
pub fn tet10_node_coords() -> [[f64; 3]; 10] {
    let c = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut out = [[0.0; 3]; 10];
    out[..4].copy_from_slice(&c);
    for (e, &(i, j)) in TET10_EDGES.iter().enumerate() {
        for k in 0..3 {
            out[4 + e][k] = 0.5 * (c[i][k] + c[j][k]);
        }
    }
    out
}
