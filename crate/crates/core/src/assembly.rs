//! Mass and stiffness assembly for the mixed system
//!
//! ```text
//! [ M  Kᵀ ] [v]   [0]
//! [ K  0  ] [u] = [b]
//! ```
//!
//! `M` is the full mass matrix over all `n_i + n_d` dofs, `K` the rows of the
//! stiffness matrix belonging to interior dofs, and `M̂`, `K̂` the interior
//! principal blocks.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::space::{basis, basis_bary_grad, bary_gradients, FunctionSpace, LOCAL_DOFS};
use crate::sparse::SparseMatrix;

type Local = [[f64; LOCAL_DOFS]; LOCAL_DOFS];

/// Area-normalised reference integrals: the mass matrix and the nine products
/// of barycentric derivatives.
struct Reference {
    mass: Local,
    grad: [[Local; 3]; 3],
}

fn reference() -> &'static Reference {
    static REF: OnceLock<Reference> = OnceLock::new();
    REF.get_or_init(|| {
        let mut mass = [[0.0; LOCAL_DOFS]; LOCAL_DOFS];
        let mut grad = [[[[0.0; LOCAL_DOFS]; LOCAL_DOFS]; 3]; 3];
        for q in quadrature::degree6() {
            let phi = basis(q.bary);
            let d = basis_bary_grad(q.bary);
            for i in 0..LOCAL_DOFS {
                for j in 0..LOCAL_DOFS {
                    mass[i][j] += q.weight * phi[i] * phi[j];
                    for k in 0..3 {
                        for l in 0..3 {
                            grad[k][l][i][j] += q.weight * d[i][k] * d[j][l];
                        }
                    }
                }
            }
        }
        Reference { mass: symmetrized(mass), grad }
    })
}

fn symmetrized(a: Local) -> Local {
    let mut s = a;
    for i in 0..LOCAL_DOFS {
        for j in 0..i {
            let v = 0.5 * (a[i][j] + a[j][i]);
            s[i][j] = v;
            s[j][i] = v;
        }
    }
    s
}

fn element_area(space: &FunctionSpace, t: usize) -> Result<f64> {
    checked_area(space.mesh().triangle_area(t), t)
}

fn checked_area(area: f64, t: usize) -> Result<f64> {
    if area > 0.0 {
        Ok(area)
    } else {
        Err(Error::Quadrature { element: t, jacobian: 2.0 * area })
    }
}

pub fn element_mass(space: &FunctionSpace, t: usize) -> Result<Local> {
    let area = element_area(space, t)?;
    Ok(reference().mass.map(|row| row.map(|v| area * v)))
}

pub fn element_stiffness(space: &FunctionSpace, t: usize) -> Result<Local> {
    element_area(space, t)?;
    let (g, area) = bary_gradients(space.mesh().triangle_points(t));
    let r = reference();
    let mut out = [[0.0; LOCAL_DOFS]; LOCAL_DOFS];
    for k in 0..3 {
        for l in 0..3 {
            let c = area * (g[k][0] * g[l][0] + g[k][1] * g[l][1]);
            for i in 0..LOCAL_DOFS {
                for j in 0..LOCAL_DOFS {
                    out[i][j] += c * r.grad[k][l][i][j];
                }
            }
        }
    }
    Ok(symmetrized(out))
}

fn assemble(
    space: &FunctionSpace,
    local: impl Fn(&FunctionSpace, usize) -> Result<Local>,
) -> Result<SparseMatrix> {
    let dofs: Vec<[usize; LOCAL_DOFS]> =
        (0..space.mesh().n_triangles()).map(|t| space.ordered_dofs(t)).collect();
    let mut a = SparseMatrix::with_block_pattern(space.n_dofs(), dofs.iter().map(|d| &d[..]), true);
    for (t, d) in dofs.iter().enumerate() {
        a.scatter_add(d, &local(space, t)?);
    }
    Ok(a)
}

/// Full mass matrix and its interior block `M̂`.
pub fn assemble_mass(space: &FunctionSpace) -> Result<(SparseMatrix, SparseMatrix)> {
    let m = assemble(space, element_mass)?;
    let m_hat = m.submatrix(0..space.n_i, 0..space.n_i);
    Ok((m, m_hat))
}

/// Full stiffness matrix and its interior rows `K` (`n_i × (n_i + n_d)`).
pub fn assemble_stiffness(space: &FunctionSpace) -> Result<(SparseMatrix, SparseMatrix)> {
    let a = assemble(space, element_stiffness)?;
    let k = a.submatrix(0..space.n_i, 0..space.n_dofs());
    Ok((a, k))
}

#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub n_i: usize,
    pub n_d: usize,
    /// Full mass matrix.
    pub m: SparseMatrix,
    /// Interior rows of the stiffness matrix.
    pub k: SparseMatrix,
    pub m_hat: SparseMatrix,
    pub k_hat: SparseMatrix,
}

pub fn assemble_system(space: &FunctionSpace) -> Result<BlockSystem> {
    let (m, m_hat) = assemble_mass(space)?;
    let (a, k) = assemble_stiffness(space)?;
    let k_hat = a.submatrix(0..space.n_i, 0..space.n_i);
    Ok(BlockSystem { n_i: space.n_i, n_d: space.n_d, m, k, m_hat, k_hat })
}

impl BlockSystem {
    pub fn n_dofs(&self) -> usize {
        self.n_i + self.n_d
    }

    /// Size of the saddle-point system, `(n_i + n_d) + n_i`.
    pub fn dimension(&self) -> usize {
        self.n_dofs() + self.n_i
    }

    /// `(M v + Kᵀ u, K v)`.
    pub fn apply(&self, v: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut top = self.m.mul_vec(v);
        for (t, x) in top.iter_mut().zip(self.k.transpose_mul_vec(u)) {
            *t += x;
        }
        (top, self.k.mul_vec(v))
    }

    /// Stored entries of the full saddle-point matrix as triplets.
    pub fn saddle_triplets(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n_dofs();
        let mut t: Vec<(usize, usize, f64)> = self.m.triplets().collect();
        for (i, j, v) in self.k.triplets() {
            t.push((n + i, j, v));
            t.push((j, n + i, v));
        }
        t
    }
}
