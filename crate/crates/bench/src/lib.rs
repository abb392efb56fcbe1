//! Criterion benchmarks for the biharm kernels; see `benches/`.

use std::sync::Arc;

use biharm::{assemble_system, build_space, square_mesh, BlockSystem, FunctionSpace};

/// Graded unit-square space and its assembled system.
pub fn square_system(h1: f64, rho1: f64) -> (FunctionSpace, BlockSystem) {
    let space = build_space(Arc::new(square_mesh(h1, rho1).expect("valid grading"))).expect("valid mesh");
    let system = assemble_system(&space).expect("assembly");
    (space, system)
}
