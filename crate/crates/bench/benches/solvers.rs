use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use klt_core::cylinder::{ground_state_2d_oracle, CylinderPotential};
use klt_core::grid::Grid1D;
use klt_core::line::{ground_state_1d, radial_gns_constant, raw_bottom_eigenvalue};
use klt_core::manifold::sphere_spec;
use klt_core::params::{make_params, mu_one, optimal_potential};
use klt_core::tridiag;
use klt_core::variational::{gns_constant, OptMode, OptimizerConfig};
use std::hint::black_box;

fn reference_potential(n: usize) -> klt_core::line::SampledPotential1D {
    let grid = Grid1D::symmetric(20.0, n).unwrap();
    klt_core::line::SampledPotential1D::from_fn(grid, |s| 2.0 / s.cosh().powi(2))
}

fn bench_sturm(c: &mut Criterion) {
    let v = reference_potential(2001);
    let h = v.grid.h();
    let diag: Vec<f64> = v.values.iter().map(|&x| 2.0 / (h * h) - x).collect();
    c.bench_function("sturm_bottom_eigenvalue_2001", |b| {
        b.iter(|| tridiag::bottom_eigenvalue(black_box(&diag), black_box(-1.0 / (h * h))))
    });
}

fn bench_ground_state(c: &mut Criterion) {
    let v = reference_potential(2001);
    c.bench_function("ground_state_1d_2001", |b| b.iter(|| ground_state_1d(black_box(&v)).unwrap()));
    let v4 = reference_potential(4001);
    c.bench_function("raw_bottom_eigenvalue_4001", |b| {
        b.iter(|| raw_bottom_eigenvalue(black_box(&v4)))
    });
}

fn bench_oracle(c: &mut Criterion) {
    let pr = make_params(2, 2.0).unwrap();
    let vopt = optimal_potential(mu_one(&pr), &pr).unwrap();
    let v = vopt.sample(Grid1D::symmetric(14.0, 201).unwrap());
    let v2 = CylinderPotential::broadcast(&v, 16).unwrap();
    let mut group = c.benchmark_group("oracle2d");
    group.sample_size(10);
    group.bench_function("oracle_201x16", |b| {
        b.iter_batched(
            || v2.clone(),
            |v2| ground_state_2d_oracle(black_box(&v2), Some(-1.0)).unwrap(),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

fn bench_gns(c: &mut Criterion) {
    let pr = make_params(2, 2.0).unwrap();
    let circle = sphere_spec(2, 4).unwrap();
    let cfg = OptimizerConfig { grid_n: 321, grid_m: 32, ..OptimizerConfig::default() };
    let mut group = c.benchmark_group("gns");
    group.sample_size(10);
    group.bench_function("gns_symmetric", |b| {
        b.iter(|| gns_constant(black_box(1.0), &pr, &circle, OptMode::Symmetric, &cfg).unwrap())
    });
    group.bench_function("gns_general2d_broken", |b| {
        b.iter(|| gns_constant(black_box(1.0), &pr, &circle, OptMode::General2d, &cfg).unwrap())
    });
    group.finish();
}

fn bench_radial(c: &mut Criterion) {
    let mut group = c.benchmark_group("radial");
    group.sample_size(10);
    group.bench_function("radial_constant_d2_p4", |b| {
        b.iter(|| radial_gns_constant(black_box(2), black_box(4.0)).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_sturm,
    bench_ground_state,
    bench_oracle,
    bench_gns,
    bench_radial
);
criterion_main!(benches);
