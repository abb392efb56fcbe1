//! Inverse iteration on the mixed system.
//!
//! Each step solves `[[M, Kᵀ], [K, 0]] (v, u') = (0, -B u)`, which is
//! `S u' = B u` with `S = K M⁻¹ Kᵀ` and `B = M̂` (clamped) or `K̂` (buckling).

use std::fmt;
use std::str::FromStr;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{assemble_stiffness, BlockSystem};
use crate::error::{Error, Result};
use crate::space::FunctionSpace;
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Problem {
    #[default]
    Clamped,
    Buckling,
}

impl Problem {
    pub fn as_str(&self) -> &'static str {
        match self {
            Problem::Clamped => "clamped",
            Problem::Buckling => "buckling",
        }
    }

    /// The right-hand side operator `B` of the pencil `(S, B)`.
    pub fn rhs<'a>(&self, system: &'a BlockSystem) -> &'a SparseMatrix {
        match self {
            Problem::Clamped => &system.m_hat,
            Problem::Buckling => &system.k_hat,
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "clamped" => Ok(Problem::Clamped),
            "buckling" => Ok(Problem::Buckling),
            other => Err(Error::Parse(format!("unknown problem '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub problem: Problem,
    /// Relative change in λ between iterations below which iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { problem: Problem::Clamped, tol: 1e-12, max_iter: 500, seed: 0 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidSpec(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidSpec("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: f64,
    /// Interior coefficients, normalised so `uᵀ B u = 1`.
    pub u: Vec<f64>,
    /// Coefficients over all dofs of the discrete `Δu`, with `M v + Kᵀ u = 0`.
    pub v: Vec<f64>,
    /// `‖K v + λ B u‖ / (λ ‖B u‖)`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl EigenPair {
    /// `u` extended by zeros to all dofs.
    pub fn full_u(&self, n_dofs: usize) -> Vec<f64> {
        let mut x = self.u.clone();
        x.resize(n_dofs, 0.0);
        x
    }
}

/// Sparse LU of the symmetrically scaled saddle-point matrix `D A D`, reusable
/// for any number of solves. `D` is `M_kk^{-1/2}` on the `v` rows and
/// `M_kk^{1/2}` on the `u` rows, which brings both blocks to unit size on
/// strongly graded meshes.
pub struct Factorization {
    lu: Lu<usize, f64>,
    scale: Vec<f64>,
    n_i: usize,
    n_d: usize,
}

impl fmt::Debug for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Factorization").field("n_i", &self.n_i).field("n_d", &self.n_d).finish()
    }
}

pub fn factorize(system: &BlockSystem) -> Result<Factorization> {
    let n = system.dimension();
    let n_dofs = system.n_dofs();
    let mut scale = Vec::with_capacity(n);
    for k in 0..n_dofs {
        let d = system.m.get(k, k);
        if !(d > 0.0) {
            return Err(Error::SingularSystem(format!("mass diagonal {d} at dof {k}")));
        }
        scale.push(1.0 / d.sqrt());
    }
    scale.extend((0..system.n_i).map(|k| system.m.get(k, k).sqrt()));
    let triplets: Vec<Triplet<usize, usize, f64>> = system
        .saddle_triplets()
        .into_iter()
        .map(|(i, j, v)| Triplet::new(i, j, scale[i] * v * scale[j]))
        .collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::SingularSystem(format!("matrix construction: {e:?}")))?;
    let lu = a.sp_lu().map_err(|e| Error::SingularSystem(format!("{e:?}")))?;
    Ok(Factorization { lu, scale, n_i: system.n_i, n_d: system.n_d })
}

impl Factorization {
    pub fn n_i(&self) -> usize {
        self.n_i
    }

    pub fn n_d(&self) -> usize {
        self.n_d
    }

    fn solve_raw(&self, top: &[f64], bottom: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.n_i + self.n_d;
        let mut rhs = Mat::<f64>::zeros(n + self.n_i, 1);
        for (k, &x) in top.iter().chain(bottom).enumerate() {
            rhs[(k, 0)] = self.scale[k] * x;
        }
        self.lu.solve_in_place(rhs.as_mut());
        let x: Vec<f64> = (0..n + self.n_i).map(|k| self.scale[k] * rhs[(k, 0)]).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem("non-finite solution".into()));
        }
        Ok((x[..n].to_vec(), x[n..].to_vec()))
    }

    /// Solves `[[M, Kᵀ], [K, 0]] (v, u) = (0, b)` with one step of iterative
    /// refinement against the unfactored operator.
    pub fn solve(&self, system: &BlockSystem, b: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        assert_eq!(b.len(), self.n_i);
        let zeros = vec![0.0; self.n_i + self.n_d];
        let (mut v, mut u) = self.solve_raw(&zeros, b)?;
        let (top, bottom) = system.apply(&v, &u);
        let r_top: Vec<f64> = top.iter().map(|x| -x).collect();
        let r_bottom: Vec<f64> = b.iter().zip(&bottom).map(|(b, x)| b - x).collect();
        let (dv, du) = self.solve_raw(&r_top, &r_bottom)?;
        v.iter_mut().zip(dv).for_each(|(a, d)| *a += d);
        u.iter_mut().zip(du).for_each(|(a, d)| *a += d);
        Ok((v, u))
    }
}

/// Interior block `K̂` of the stiffness matrix.
pub fn buckling_rhs(space: &FunctionSpace) -> Result<SparseMatrix> {
    let (a, _) = assemble_stiffness(space)?;
    Ok(a.submatrix(0..space.n_i, 0..space.n_i))
}

/// Residual level an iterate must also reach, besides the λ criterion.
pub const RESIDUAL_TARGET: f64 = 1e-8;

fn residual_of(system: &BlockSystem, b_op: &SparseMatrix, lambda: f64, u: &[f64], v: &[f64]) -> f64 {
    let bu = b_op.mul_vec(u);
    let kv = system.k.mul_vec(v);
    let r: f64 = kv.iter().zip(&bu).map(|(a, b)| (a + lambda * b).powi(2)).sum::<f64>().sqrt();
    r / (lambda * dot(&bu, &bu).sqrt())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}

/// Restrictions placed on the iterate each step.
#[derive(Debug, Clone, Copy, Default)]
pub struct Constraints<'a> {
    /// Pairs to orthogonalise against in the `B` inner product.
    pub deflate: &'a [&'a EigenPair],
    /// Mirror permutation over all dofs together with the sign of the wanted
    /// symmetry (`+1` even, `-1` odd).
    pub symmetry: Option<(&'a [usize], f64)>,
}

fn symmetrize(x: &mut [f64], mirror: &[usize], sign: f64) {
    let y: Vec<f64> = (0..x.len()).map(|k| 0.5 * (x[k] + sign * x[mirror[k]])).collect();
    x.copy_from_slice(&y);
}

/// Inverse iteration for the smallest eigenvalue of `(S, B)` subject to
/// `constraints`. Stops once the relative change in λ is below `config.tol`
/// and the residual below [`RESIDUAL_TARGET`]. On non-convergence the last
/// iterate is returned with `converged = false`.
pub fn constrained_eigenpair(
    system: &BlockSystem,
    factorization: &Factorization,
    config: &SolverConfig,
    constraints: Constraints<'_>,
) -> Result<EigenPair> {
    config.validate()?;
    let n_i = system.n_i;
    let n = system.n_dofs();
    if n_i == 0 {
        return Err(Error::SingularSystem("no interior dofs".into()));
    }
    let b_op = config.problem.rhs(system);
    if let Some((mirror, _)) = constraints.symmetry {
        if mirror.len() != n {
            return Err(Error::AsymmetricMesh(format!(
                "mirror map has {} entries for {n} dofs",
                mirror.len()
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut u = random_vector(&mut rng, n_i);
    let mut v = vec![0.0; n];

    let project = |u: &mut Vec<f64>, v: &mut Vec<f64>| {
        if let Some((mirror, sign)) = constraints.symmetry {
            let mut full = u.clone();
            full.resize(n, 0.0);
            symmetrize(&mut full, mirror, sign);
            u.copy_from_slice(&full[..n_i]);
            symmetrize(v, mirror, sign);
        }
        for w in constraints.deflate {
            let c = dot(&b_op.mul_vec(u), &w.u);
            axpy(-c, &w.u, u);
            axpy(-c, &w.v, v);
        }
    };

    project(&mut u, &mut v);
    let norm = b_op.quad_form(&u).sqrt();
    if !(norm > 0.0) {
        return Err(Error::SingularSystem("initial vector vanished under the constraints".into()));
    }
    u.iter_mut().for_each(|x| *x /= norm);

    let mut lambda = f64::INFINITY;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        iterations += 1;
        let b: Vec<f64> = b_op.mul_vec(&u).iter().map(|x| -x).collect();
        let (v_new, u_new) = factorization.solve(system, &b)?;
        u = u_new;
        v = v_new;
        project(&mut u, &mut v);
        let bu = b_op.quad_form(&u);
        if !(bu > 0.0) {
            return Err(Error::SingularSystem("iterate vanished".into()));
        }
        let scale = 1.0 / bu.sqrt();
        u.iter_mut().for_each(|x| *x *= scale);
        v.iter_mut().for_each(|x| *x *= scale);
        let next = system.m.quad_form(&v);
        let change = (next - lambda).abs() / next;
        lambda = next;
        residual = residual_of(system, b_op, lambda, &u, &v);
        if change < config.tol && residual < RESIDUAL_TARGET {
            converged = true;
            break;
        }
    }
    Ok(EigenPair { lambda, u, v, residual, iterations, converged })
}

fn require_converged(pair: EigenPair) -> Result<EigenPair> {
    if pair.converged {
        Ok(pair)
    } else {
        Err(Error::NonConvergence(format!(
            "inverse iteration stopped after {} iterations at lambda = {}",
            pair.iterations, pair.lambda
        )))
    }
}

/// Smallest eigenpair. Fails with `NonConvergence` if the cap is reached; use
/// [`constrained_eigenpair`] to get the last iterate instead.
pub fn smallest_eigenpair(
    system: &BlockSystem,
    factorization: &Factorization,
    config: &SolverConfig,
) -> Result<EigenPair> {
    require_converged(constrained_eigenpair(system, factorization, config, Constraints::default())?)
}

/// Next eigenpair after `deflate`, orthogonalising against it every step.
pub fn second_eigenpair(
    system: &BlockSystem,
    factorization: &Factorization,
    config: &SolverConfig,
    deflate: &EigenPair,
) -> Result<EigenPair> {
    let list = [deflate];
    let constraints = Constraints { deflate: &list, symmetry: None };
    require_converged(constrained_eigenpair(system, factorization, config, constraints)?)
}

/// Smallest eigenpair within the even (`sign = 1`) or odd (`sign = -1`)
/// subspace of a mirror permutation.
pub fn symmetric_eigenpair(
    system: &BlockSystem,
    factorization: &Factorization,
    config: &SolverConfig,
    mirror: &[usize],
    sign: f64,
) -> Result<EigenPair> {
    let constraints = Constraints { deflate: &[], symmetry: Some((mirror, sign)) };
    require_converged(constrained_eigenpair(system, factorization, config, constraints)?)
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Makes the columns `(u_j, v_j)` orthonormal in the `B` inner product of the
/// `u` parts, applying the same combinations to the `v` parts.
fn b_orthonormalise(b_op: &SparseMatrix, us: &mut [Vec<f64>], vs: &mut [Vec<f64>]) -> Result<()> {
    for j in 0..us.len() {
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for i in 0..j {
                let c = dot(&b_op.mul_vec(&us[j]), &us[i]);
                let (ui, vi) = (us[i].clone(), vs[i].clone());
                axpy(-c, &ui, &mut us[j]);
                axpy(-c, &vi, &mut vs[j]);
            }
        }
        let norm = b_op.quad_form(&us[j]).sqrt();
        if !(norm > 0.0) {
            return Err(Error::SingularSystem("subspace collapsed".into()));
        }
        us[j].iter_mut().for_each(|x| *x /= norm);
        vs[j].iter_mut().for_each(|x| *x /= norm);
    }
    Ok(())
}

/// The `k` smallest eigenpairs by block inverse iteration with a
/// Rayleigh-Ritz step on the iterated subspace, in increasing order of λ.
/// Stops when every Ritz value meets the λ criterion of `config` and every
/// residual is below [`RESIDUAL_TARGET`].
pub fn lowest_eigenpairs(
    system: &BlockSystem,
    factorization: &Factorization,
    config: &SolverConfig,
    k: usize,
) -> Result<Vec<EigenPair>> {
    config.validate()?;
    let n_i = system.n_i;
    if k == 0 || k > n_i {
        return Err(Error::InvalidSpec(format!("cannot compute {k} pairs with {n_i} interior dofs")));
    }
    let b_op = config.problem.rhs(system);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut us: Vec<Vec<f64>> = (0..k).map(|_| random_vector(&mut rng, n_i)).collect();
    let mut vs: Vec<Vec<f64>> = vec![vec![0.0; system.n_dofs()]; k];
    b_orthonormalise(b_op, &mut us, &mut vs)?;

    let mut lambdas = vec![f64::INFINITY; k];
    let mut residuals = vec![f64::INFINITY; k];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        iterations += 1;
        for j in 0..k {
            let b: Vec<f64> = b_op.mul_vec(&us[j]).iter().map(|x| -x).collect();
            let (v, u) = factorization.solve(system, &b)?;
            us[j] = u;
            vs[j] = v;
        }
        b_orthonormalise(b_op, &mut us, &mut vs)?;
        let mv: Vec<Vec<f64>> = vs.iter().map(|v| system.m.mul_vec(v)).collect();
        let h = Mat::<f64>::from_fn(k, k, |a, b| 0.5 * (dot(&vs[a], &mv[b]) + dot(&vs[b], &mv[a])));
        let eig = h
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| Error::NonConvergence(format!("Ritz problem: {e:?}")))?;
        let w = eig.U();
        let rotate = |xs: &[Vec<f64>]| -> Vec<Vec<f64>> {
            (0..k)
                .map(|j| {
                    let mut y = vec![0.0; xs[0].len()];
                    for (i, x) in xs.iter().enumerate() {
                        axpy(w[(i, j)], x, &mut y);
                    }
                    y
                })
                .collect()
        };
        us = rotate(&us);
        vs = rotate(&vs);
        let mut done = true;
        for j in 0..k {
            let next = eig.S()[j];
            if !(next > 0.0) {
                return Err(Error::SingularSystem(format!("non-positive Ritz value {next}")));
            }
            let change = (next - lambdas[j]).abs() / next;
            lambdas[j] = next;
            residuals[j] = residual_of(system, b_op, next, &us[j], &vs[j]);
            done &= change < config.tol && residuals[j] < RESIDUAL_TARGET;
        }
        if done {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(format!(
            "block inverse iteration stopped after {iterations} iterations at {lambdas:?}"
        )));
    }
    Ok(us
        .into_iter()
        .zip(vs)
        .enumerate()
        .map(|(j, (u, v))| EigenPair {
            lambda: lambdas[j],
            u,
            v,
            residual: residuals[j],
            iterations,
            converged,
        })
        .collect())
}

/// Rotates two `B`-orthonormal eigenpairs by `angle` within their span and
/// recomputes eigenvalues and residuals. Any rotation is again a basis of
/// eigenvectors when the two eigenvalues coincide.
pub fn rotate_pair(system: &BlockSystem, problem: Problem, a: &EigenPair, b: &EigenPair, angle: f64) -> [EigenPair; 2] {
    let b_op = problem.rhs(system);
    let (s, c) = angle.sin_cos();
    let mix = |x: &[f64], y: &[f64], p: f64, q: f64| -> Vec<f64> { x.iter().zip(y).map(|(x, y)| p * x + q * y).collect() };
    [(c, s), (-s, c)].map(|(p, q)| {
        let u = mix(&a.u, &b.u, p, q);
        let v = mix(&a.v, &b.v, p, q);
        let lambda = system.m.quad_form(&v) / b_op.quad_form(&u);
        EigenPair {
            lambda,
            residual: residual_of(system, b_op, lambda, &u, &v),
            u,
            v,
            iterations: a.iterations.max(b.iterations),
            converged: a.converged && b.converged,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble_system;
    use crate::mesh::square_mesh;
    use crate::space::build_space;
    use std::sync::Arc;

    fn square(h1: f64, rho1: f64) -> (FunctionSpace, BlockSystem) {
        let s = build_space(Arc::new(square_mesh(h1, rho1).unwrap())).unwrap();
        let sys = assemble_system(&s).unwrap();
        (s, sys)
    }

    #[test]
    fn solve_satisfies_both_block_rows() {
        let (_, sys) = square(0.25, 0.05);
        let f = factorize(&sys).unwrap();
        let b: Vec<f64> = (0..sys.n_i).map(|k| (k as f64).sin()).collect();
        let (v, u) = f.solve(&sys, &b).unwrap();
        let (top, bottom) = sys.apply(&v, &u);
        let scale = sys.k.transpose_mul_vec(&u).iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(top.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-10 * scale);
        let bn = dot(&b, &b).sqrt();
        let err = bottom.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        assert!(err < 1e-10 * bn);
        let (v2, u2) = f.solve(&sys, &b).unwrap();
        assert_eq!((v, u), (v2, u2));
    }

    #[test]
    fn clamped_and_buckling_differ() {
        let (s, sys) = square(0.25, 0.05);
        let f = factorize(&sys).unwrap();
        let c = smallest_eigenpair(&sys, &f, &SolverConfig::default()).unwrap();
        let cfg = SolverConfig { problem: Problem::Buckling, ..Default::default() };
        let b = smallest_eigenpair(&sys, &f, &cfg).unwrap();
        assert!(c.lambda > 0.0 && b.lambda > 0.0);
        assert!((c.lambda - b.lambda).abs() > 1.0);
        assert!((sys.k_hat.quad_form(&b.u) - 1.0).abs() < 1e-12);
        assert!((sys.m_hat.quad_form(&c.u) - 1.0).abs() < 1e-12);
        assert_eq!(buckling_rhs(&s).unwrap(), sys.k_hat);
    }

    #[test]
    fn rejects_bad_config() {
        let (_, sys) = square(0.5, 0.2);
        let f = factorize(&sys).unwrap();
        let cfg = SolverConfig { tol: 0.0, ..Default::default() };
        assert!(matches!(smallest_eigenpair(&sys, &f, &cfg), Err(Error::InvalidSpec(_))));
        let cfg = SolverConfig { max_iter: 1, ..Default::default() };
        assert!(matches!(smallest_eigenpair(&sys, &f, &cfg), Err(Error::NonConvergence(_))));
        assert!("plate".parse::<Problem>().is_err());
    }
}
