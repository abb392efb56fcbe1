//! Piecewise cubic Lagrange space on a triangulation.
//!
//! Local node order on a triangle `(v0, v1, v2)`: the three vertices, two nodes
//! on each edge `(v0,v1)`, `(v1,v2)`, `(v2,v0)` (first the one nearer the edge's
//! starting vertex), then the centroid. Globally the two nodes of an edge are
//! numbered starting from the endpoint with the lower vertex index.

use std::sync::Arc;

use crate::error::Result;
use crate::mesh::Mesh;

pub const LOCAL_DOFS: usize = 10;

/// Barycentric coordinates of the local nodes.
pub const LOCAL_NODES: [[f64; 3]; LOCAL_DOFS] = [
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [2.0 / 3.0, 1.0 / 3.0, 0.0],
    [1.0 / 3.0, 2.0 / 3.0, 0.0],
    [0.0, 2.0 / 3.0, 1.0 / 3.0],
    [0.0, 1.0 / 3.0, 2.0 / 3.0],
    [1.0 / 3.0, 0.0, 2.0 / 3.0],
    [2.0 / 3.0, 0.0, 1.0 / 3.0],
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
];

// (near, far) vertex of each edge node
const EDGE_NODES: [(usize, usize); 6] = [(0, 1), (1, 0), (1, 2), (2, 1), (2, 0), (0, 2)];

/// Cubic Lagrange basis at barycentric point `l`.
pub fn basis(l: [f64; 3]) -> [f64; LOCAL_DOFS] {
    let mut phi = [0.0; LOCAL_DOFS];
    for a in 0..3 {
        phi[a] = 0.5 * l[a] * (3.0 * l[a] - 1.0) * (3.0 * l[a] - 2.0);
    }
    for (k, &(a, b)) in EDGE_NODES.iter().enumerate() {
        phi[3 + k] = 4.5 * l[a] * l[b] * (3.0 * l[a] - 1.0);
    }
    phi[9] = 27.0 * l[0] * l[1] * l[2];
    phi
}

/// Partial derivatives of the basis with respect to the three barycentric
/// coordinates, treated as independent variables.
pub fn basis_bary_grad(l: [f64; 3]) -> [[f64; 3]; LOCAL_DOFS] {
    let mut d = [[0.0; 3]; LOCAL_DOFS];
    for a in 0..3 {
        d[a][a] = 0.5 * (27.0 * l[a] * l[a] - 18.0 * l[a] + 2.0);
    }
    for (k, &(a, b)) in EDGE_NODES.iter().enumerate() {
        d[3 + k][a] = 4.5 * l[b] * (6.0 * l[a] - 1.0);
        d[3 + k][b] = 4.5 * l[a] * (3.0 * l[a] - 1.0);
    }
    d[9] = [27.0 * l[1] * l[2], 27.0 * l[0] * l[2], 27.0 * l[0] * l[1]];
    d
}

/// Gradients of the barycentric coordinates of a triangle and its signed area.
pub fn bary_gradients(p: [[f64; 2]; 3]) -> ([[f64; 2]; 3], f64) {
    let [p0, p1, p2] = p;
    let twice = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]);
    let g = [
        [(p1[1] - p2[1]) / twice, (p2[0] - p1[0]) / twice],
        [(p2[1] - p0[1]) / twice, (p0[0] - p2[0]) / twice],
        [(p0[1] - p1[1]) / twice, (p1[0] - p0[0]) / twice],
    ];
    (g, 0.5 * twice)
}

/// Barycentric coordinates of `x` with respect to triangle `p`.
pub fn barycentric(p: [[f64; 2]; 3], x: [f64; 2]) -> [f64; 3] {
    let [p0, p1, p2] = p;
    let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]);
    let l1 = ((x[0] - p0[0]) * (p2[1] - p0[1]) - (x[1] - p0[1]) * (p2[0] - p0[0])) / det;
    let l2 = ((p1[0] - p0[0]) * (x[1] - p0[1]) - (p1[1] - p0[1]) * (x[0] - p0[0])) / det;
    [1.0 - l1 - l2, l1, l2]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    Vertex,
    Edge,
    Interior,
}

/// Degree-of-freedom map. Dofs have a *global* number (vertices, then two per
/// edge, then one per triangle) and an *ordered* number that places the `n_i`
/// interior dofs before the `n_d` Dirichlet dofs; matrices use the ordered one.
#[derive(Debug, Clone)]
pub struct FunctionSpace {
    mesh: Arc<Mesh>,
    /// Coordinates per global dof.
    pub dof_coords: Vec<[f64; 2]>,
    pub dof_kind: Vec<DofKind>,
    /// Global dofs of each triangle in local node order.
    pub element_dofs: Vec<[usize; LOCAL_DOFS]>,
    /// Global dof -> ordered index.
    pub ordered: Vec<usize>,
    /// Ordered index -> global dof.
    pub global: Vec<usize>,
    pub n_i: usize,
    pub n_d: usize,
    pub n_edges: usize,
}

/// Validates the mesh and builds its cubic Lagrange space.
pub fn build_space(mesh: Arc<Mesh>) -> Result<FunctionSpace> {
    mesh.validate()?;
    let nv = mesh.n_vertices();
    let (edges, edge_index) = mesh.edges();
    let ne = edges.len();
    let nt = mesh.n_triangles();
    let n = nv + 2 * ne + nt;

    let mut dof_coords = vec![[0.0; 2]; n];
    let mut dof_kind = vec![DofKind::Vertex; n];
    dof_coords[..nv].copy_from_slice(&mesh.vertices);
    for (e, &[a, b]) in edges.iter().enumerate() {
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        dof_coords[nv + 2 * e] = [(2.0 * pa[0] + pb[0]) / 3.0, (2.0 * pa[1] + pb[1]) / 3.0];
        dof_coords[nv + 2 * e + 1] = [(pa[0] + 2.0 * pb[0]) / 3.0, (pa[1] + 2.0 * pb[1]) / 3.0];
        dof_kind[nv + 2 * e] = DofKind::Edge;
        dof_kind[nv + 2 * e + 1] = DofKind::Edge;
    }
    let mut element_dofs = Vec::with_capacity(nt);
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let mut dofs = [0usize; LOCAL_DOFS];
        dofs[..3].copy_from_slice(tri);
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let e = edge_index[&(a.min(b), a.max(b))];
            let (first, second) = (nv + 2 * e, nv + 2 * e + 1);
            // local node 3+2k sits nearer `a`
            if a < b {
                dofs[3 + 2 * k] = first;
                dofs[4 + 2 * k] = second;
            } else {
                dofs[3 + 2 * k] = second;
                dofs[4 + 2 * k] = first;
            }
        }
        let bubble = nv + 2 * ne + t;
        dofs[9] = bubble;
        let c = mesh.triangle_centroid(t);
        dof_coords[bubble] = c;
        dof_kind[bubble] = DofKind::Interior;
        element_dofs.push(dofs);
    }

    let mut dirichlet = vec![false; n];
    for be in &mesh.boundary_edges {
        let [a, b] = be.vertices;
        let e = edge_index[&(a.min(b), a.max(b))];
        for d in [a, b, nv + 2 * e, nv + 2 * e + 1] {
            dirichlet[d] = true;
        }
    }
    let mut global: Vec<usize> = (0..n).filter(|&d| !dirichlet[d]).collect();
    let n_i = global.len();
    global.extend((0..n).filter(|&d| dirichlet[d]));
    let mut ordered = vec![0; n];
    for (k, &g) in global.iter().enumerate() {
        ordered[g] = k;
    }
    Ok(FunctionSpace {
        mesh,
        dof_coords,
        dof_kind,
        element_dofs,
        ordered,
        global,
        n_i,
        n_d: n - n_i,
        n_edges: ne,
    })
}

impl FunctionSpace {
    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn n_dofs(&self) -> usize {
        self.n_i + self.n_d
    }

    /// Element dofs in ordered numbering.
    pub fn ordered_dofs(&self, t: usize) -> [usize; LOCAL_DOFS] {
        self.element_dofs[t].map(|g| self.ordered[g])
    }

    pub fn is_dirichlet(&self, global_dof: usize) -> bool {
        self.ordered[global_dof] >= self.n_i
    }

    /// Coordinates of the dof with the given ordered index.
    pub fn ordered_coords(&self, k: usize) -> [f64; 2] {
        self.dof_coords[self.global[k]]
    }

    /// Pads an interior coefficient vector with zeros on the Dirichlet dofs.
    pub fn extend_interior(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.n_i);
        let mut full = u.to_vec();
        full.resize(self.n_dofs(), 0.0);
        full
    }

    /// Value of the field with ordered coefficients `coeffs` at barycentric
    /// point `l` of triangle `t`.
    pub fn eval(&self, coeffs: &[f64], t: usize, l: [f64; 3]) -> f64 {
        let phi = basis(l);
        self.ordered_dofs(t).iter().zip(phi).map(|(&d, p)| coeffs[d] * p).sum()
    }

    /// Gradient of the field in triangle `t` at barycentric point `l`.
    pub fn eval_grad(&self, coeffs: &[f64], t: usize, l: [f64; 3]) -> [f64; 2] {
        let (g, _) = bary_gradients(self.mesh.triangle_points(t));
        let d = basis_bary_grad(l);
        let mut out = [0.0; 2];
        for (&dof, dl) in self.ordered_dofs(t).iter().zip(d) {
            for k in 0..3 {
                out[0] += coeffs[dof] * dl[k] * g[k][0];
                out[1] += coeffs[dof] * dl[k] * g[k][1];
            }
        }
        out
    }

    /// Interpolates `f` at the dof coordinates, in ordered numbering.
    pub fn interpolate(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        (0..self.n_dofs()).map(|k| f(self.ordered_coords(k))).collect()
    }
}
