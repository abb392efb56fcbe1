mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use biharm::{assemble_system, build_space, disk_mesh, factorize, smallest_eigenpair, SolverConfig};
use common::{dense, generalized_eigen, grid_mesh, rel};

#[test]
fn laplacian_on_uniform_unit_square() {
    let space = build_space(Arc::new(grid_mesh(8, 8, 1.0, 1.0, |_, _| [0.0, 0.0]))).unwrap();
    let sys = assemble_system(&space).unwrap();
    let (lambda, _) = generalized_eigen(&dense(&sys.k_hat), &dense(&sys.m_hat));
    let exact = 2.0 * PI * PI;
    assert!(rel(lambda[0], exact) < 1e-3, "{} vs {exact}", lambda[0]);
}

fn bessel_series(n: u32, x: f64, alternating: bool) -> f64 {
    let mut term = (0.5 * x).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for m in 1..60 {
        term *= (0.5 * x).powi(2) / (m as f64 * (m + n) as f64);
        if alternating {
            term = -term;
        }
        sum += if alternating { term } else { term.abs() };
    }
    sum
}

/// Smallest `k` with `J0(k) I1(k) + I0(k) J1(k) = 0`, the clamped disk
/// condition `J0 I0' - I0 J0' = 0`.
fn clamped_disk_root() -> f64 {
    let j = |n, x| bessel_series(n, x, true);
    let i = |n, x| bessel_series(n, x, false);
    let g = |x: f64| j(0, x) * i(1, x) + i(0, x) * j(1, x);
    let (mut a, mut b) = (2.5, 4.0);
    assert!(g(a) * g(b) < 0.0);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if g(m).signum() == g(a).signum() {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn bessel_series_reproduces_known_values() {
    // J0(2.404825557695773) = 0 and I0(1) = 1.2660658777520082
    assert!(bessel_series(0, 2.404825557695773, true).abs() < 1e-14);
    assert!((bessel_series(0, 1.0, false) - 1.2660658777520082).abs() < 1e-14);
}

#[test]
fn clamped_disk_matches_bessel_oracle() {
    let k = clamped_disk_root();
    let exact = k.powi(4);
    assert!((k - 3.19622).abs() < 1e-5, "{k}");
    let space = build_space(Arc::new(disk_mesh(16).unwrap())).unwrap();
    let sys = assemble_system(&space).unwrap();
    let pair = smallest_eigenpair(&sys, &factorize(&sys).unwrap(), &SolverConfig::default()).unwrap();
    assert!((pair.lambda - exact).abs() < 0.5, "{} vs {exact}", pair.lambda);
    assert!((pair.lambda - 104.363).abs() < 0.5);
}
