//! Eigenvalues and eigenfunctions of the biharmonic operator on planar domains.
//!
//! The clamped plate problem `Δ²u = λu` and the buckling plate problem
//! `Δ²u = λΔu` (both with `u = ∂u/∂n = 0` on the boundary) are discretized with
//! the Ciarlet–Raviart mixed method on piecewise cubic Lagrange elements. The
//! resulting saddle-point system is factorized once and driven by inverse
//! iteration. Around a corner of interior angle `θ` the principal eigenfunction
//! oscillates with a geometric sequence of sign changes; [`corner`] predicts the
//! ratios and [`analysis`] measures them on computed eigenfunctions.

pub mod analysis;
pub mod assembly;
pub mod corner;
pub mod error;
pub mod mesh;
pub mod quadrature;
pub mod solver;
pub mod space;
pub mod sparse;

pub use analysis::{
    analyse_corner, evaluate_on_bisector, find_extrema, find_zeros, mirror_map, oscillation_report,
    parity, parity_of, parity_row, parity_sweep, BisectorProfile, Extremum, OscillationReport,
    Parity, ParityClass, ParityRow, ParitySweep, NOISE_FLOOR,
};
pub use assembly::{assemble_mass, assemble_stiffness, assemble_system, BlockSystem};
pub use corner::{critical_angle, exponent_table, ratios, solve_exponent, CornerExponent};
pub use error::{Error, Result};
pub use mesh::{
    disk_mesh, dumbbell_mesh, sector_mesh, square_mesh, BoundaryEdge, BoundaryTag, Corner,
    DomainMeta, DumbbellSpec, Mesh, SectorSpec, SectorVariant,
};
pub use solver::{
    buckling_rhs, constrained_eigenpair, factorize, second_eigenpair, smallest_eigenpair,
    symmetric_eigenpair, lowest_eigenpairs, rotate_pair, Constraints, EigenPair, Factorization, Problem, SolverConfig,
};
pub use space::{build_space, DofKind, FunctionSpace};
pub use sparse::SparseMatrix;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
