use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use nle_core::{big_delta, build, delta_s, eigh, ComplexMatrix, LocalSides, Mode, Params};

fn ensemble(name: &str) -> nle_core::Ensemble {
    build(name, &Params::default()).expect("catalog entry")
}

fn bench_eigh(c: &mut Criterion) {
    let e = ensemble("nlwe-3x3");
    let rho: ComplexMatrix = e.average_state();
    c.bench_function("eigh 9x9 average state", |b| b.iter(|| eigh(black_box(&rho)).unwrap()));
}

fn bench_quantifiers(c: &mut Criterion) {
    let nlwe = ensemble("nlwe-3x3");
    c.bench_function("delta fixed nlwe-3x3", |b| {
        b.iter(|| delta_s(black_box(&nlwe), &Mode::fixed()).unwrap())
    });

    let mixed = ensemble("more-nl-mixed");
    c.bench_function("big-delta assign more-nl-mixed", |b| {
        b.iter(|| big_delta(black_box(&mixed), &Mode::assign()).unwrap())
    });

    let upb = ensemble("tiles-upb");
    let mode = Mode::per_state_lu().with_sides(LocalSides::Target).with_restarts(4);
    let mut group = c.benchmark_group("optimizer");
    group.sample_size(10);
    group.bench_function("delta per-state-lu tiles-upb", |b| {
        b.iter(|| delta_s(black_box(&upb), &mode).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_eigh, bench_quantifiers);
criterion_main!(benches);
