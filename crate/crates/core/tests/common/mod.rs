#![allow(dead_code)]

use std::sync::Arc;

use biharm::{build_space, BoundaryEdge, BoundaryTag, DomainMeta, FunctionSpace, Mesh};
use nalgebra::DMatrix;

/// `nx` by `ny` grid on `[0, w] x [0, h]`, each cell split along the diagonal
/// from its lower-left corner, every vertex moved by `shift(i, j)`.
pub fn grid_mesh(nx: usize, ny: usize, w: f64, h: f64, shift: impl Fn(usize, usize) -> [f64; 2]) -> Mesh {
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            let s = shift(i, j);
            vertices.push([w * i as f64 / nx as f64 + s[0], h * j as f64 / ny as f64 + s[1]]);
        }
    }
    let mut triangles = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    let mut loop_ = Vec::new();
    loop_.extend((0..nx).map(|i| (id(i, 0), id(i + 1, 0))));
    loop_.extend((0..ny).map(|j| (id(nx, j), id(nx, j + 1))));
    loop_.extend((0..nx).rev().map(|i| (id(i + 1, ny), id(i, ny))));
    loop_.extend((0..ny).rev().map(|j| (id(0, j + 1), id(0, j))));
    let boundary_edges = loop_
        .into_iter()
        .map(|(a, b)| BoundaryEdge { vertices: [a, b], tag: BoundaryTag::Dirichlet })
        .collect();
    Mesh { vertices, triangles, boundary_edges, corner: None, meta: DomainMeta::Imported }
}

/// 2 x 2 grid on a 1.3 x 1 rectangle with the centre vertex displaced so the
/// mesh has no symmetry: 9 vertices, 16 edges, 8 triangles, 49 dofs.
pub fn small_space() -> FunctionSpace {
    let mesh = grid_mesh(2, 2, 1.3, 1.0, |i, j| if (i, j) == (1, 1) { [0.05, -0.05] } else { [0.0, 0.0] });
    build_space(Arc::new(mesh)).unwrap()
}

pub fn dense(m: &biharm::SparseMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.nrows(), m.ncols());
    for (i, j, v) in m.triplets() {
        d[(i, j)] += v;
    }
    d
}

/// Eigenvalues (ascending) and `B`-orthonormal eigenvectors of `S x = λ B x`
/// for symmetric `S` and SPD `B`.
pub fn generalized_eigen(s: &DMatrix<f64>, b: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let l = b.clone().cholesky().expect("B is SPD").l();
    let li = l.clone().try_inverse().unwrap();
    let c = &li * s * li.transpose();
    let c = 0.5 * (&c + c.transpose());
    let n = c.nrows();
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let y = DMatrix::from_fn(n, order.len(), |i, k| eig.eigenvectors[(i, order[k])]);
    (values, li.transpose() * y)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
