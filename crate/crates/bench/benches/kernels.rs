use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use thickpoints_core::intersection::{intersection_sample_weights, product_local_time, KernelSpec};
use thickpoints_core::lattice::{lattice_green_exact, local_time_field, run_until_exit, simulate_srw, LatticePoint};
use thickpoints_core::operators::NystromOperator;
use thickpoints_core::paths::{occupation_profile, simulate_bm, simulate_bm_from, CenterGrid, Region, Stop};
use thickpoints_core::spectra::count_thick_points;
use thickpoints_core::Point2;

fn lattice(c: &mut Criterion) {
    let n = 1u64 << 16;
    c.bench_function("local_time_field 2^16", |b| {
        b.iter_batched(|| simulate_srw(1, n, LatticePoint::ORIGIN), |w| local_time_field(&w, n).unwrap(), BatchSize::SmallInput)
    });
    let f1 = local_time_field(&simulate_srw(1, n, LatticePoint::ORIGIN), n).unwrap();
    let f2 = local_time_field(&simulate_srw(2, n, LatticePoint::ORIGIN), n).unwrap();
    c.bench_function("product + thick count 2^16", |b| {
        b.iter(|| count_thick_points(&product_local_time(&[&f1, &f2]).unwrap(), 0.05).unwrap())
    });
    c.bench_function("run_until_exit R=50", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            run_until_exit(seed, 50.0, LatticePoint::ORIGIN).unwrap()
        })
    });
    c.bench_function("lattice_green_exact R=50", |b| b.iter(|| lattice_green_exact(black_box(50.0)).unwrap()));
}

fn continuum(c: &mut Criterion) {
    let w = simulate_bm(1, 1e-4, Stop::ExitRadius(1.0)).unwrap();
    let w2 = simulate_bm_from(2, 1e-4, Point2::new(0.05, 0.0), Stop::ExitRadius(1.0)).unwrap();
    let kernel = KernelSpec::tent(0.02);
    c.bench_function("intersection_sample_weights dt=1e-4", |b| b.iter(|| intersection_sample_weights(&w, &w2, &kernel).unwrap()));
    let grid = CenterGrid::square(0.5, 0.04);
    c.bench_function("occupation_profile disc", |b| {
        b.iter(|| occupation_profile(&w, &grid, &[0.1, 0.05], Region::Disc).unwrap())
    });
    let op = NystromOperator::new(1.0, 1.0 / 64.0).unwrap();
    let v = vec![1.0; op.len()];
    c.bench_function("nystrom apply h=1/64", |b| b.iter(|| op.apply(black_box(&v))));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = lattice, continuum
}
criterion_main!(benches);
