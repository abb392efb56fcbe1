use std::hint::black_box;
use std::sync::Arc;

use biharm::{
    assemble_system, build_space, exponent_table, factorize, smallest_eigenpair, square_mesh, SolverConfig,
};
use biharm_bench::square_system;
use criterion::{criterion_group, criterion_main, Criterion};

fn exponent(c: &mut Criterion) {
    let thetas: Vec<f64> = (1..=14).map(|k| f64::to_radians(10.0 * k as f64)).collect();
    c.bench_function("exponent_table_14", |b| b.iter(|| exponent_table(black_box(&thetas)).unwrap()));
}

fn assembly(c: &mut Criterion) {
    let space = build_space(Arc::new(square_mesh(0.2, 1e-4).unwrap())).unwrap();
    c.bench_function("assemble_square_h0.2", |b| b.iter(|| assemble_system(black_box(&space)).unwrap()));
}

fn solve(c: &mut Criterion) {
    let (_, system) = square_system(0.2, 1e-4);
    let mut g = c.benchmark_group("square_h0.2");
    g.sample_size(10);
    g.bench_function("factorize", |b| b.iter(|| factorize(black_box(&system)).unwrap()));
    let f = factorize(&system).unwrap();
    let config = SolverConfig::default();
    g.bench_function("smallest_eigenpair", |b| {
        b.iter(|| smallest_eigenpair(black_box(&system), &f, &config).unwrap())
    });
    g.finish();
}

criterion_group!(benches, exponent, assembly, solve);
criterion_main!(benches);
