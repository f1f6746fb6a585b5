use std::hint::black_box;
use std::sync::Arc;

use cohstate_core::{
    autocorrelation, canonical_measure, coefficients, normalization_sq, verify_diagonal,
    QuadraturePolicy, SpectrumSpec, TimeGrid, TruncationPolicy,
};
use criterion::{criterion_group, criterion_main, Criterion};

fn harmonic() -> Arc<SpectrumSpec> {
    Arc::new(SpectrumSpec::harmonic(1.0).unwrap())
}

fn hydrogen() -> Arc<SpectrumSpec> {
    Arc::new(SpectrumSpec::hydrogen_1d(1.0).unwrap())
}

fn normalization(c: &mut Criterion) {
    let policy = TruncationPolicy::default();
    let ha = harmonic();
    let hy = hydrogen();
    let mut group = c.benchmark_group("normalization_sq");
    group.bench_function("harmonic_j5", |b| {
        b.iter(|| {
            normalization_sq(&ha, black_box(5.0), &policy)
                .unwrap()
                .value
        })
    });
    group.bench_function("hydrogen_j0.9", |b| {
        b.iter(|| {
            normalization_sq(&hy, black_box(0.9), &policy)
                .unwrap()
                .value
        })
    });
    // slow-converging corner: tens of thousands of certified terms
    group.bench_function("hydrogen_j0.999", |b| {
        b.iter(|| {
            normalization_sq(&hy, black_box(0.999), &policy)
                .unwrap()
                .value
        })
    });
    group.finish();
}

fn state_build(c: &mut Criterion) {
    let policy = TruncationPolicy::default();
    let ha = harmonic();
    let hy = hydrogen();
    let mut group = c.benchmark_group("coefficients");
    group.bench_function("harmonic_j5", |b| {
        b.iter(|| coefficients(&ha, black_box(5.0), 1.3, &policy).unwrap())
    });
    group.bench_function("hydrogen_j0.9", |b| {
        b.iter(|| coefficients(&hy, black_box(0.9), 1.3, &policy).unwrap())
    });
    group.finish();
}

fn survival(c: &mut Criterion) {
    let policy = TruncationPolicy::default();
    let ha = harmonic();
    let grid = TimeGrid::linspace(0.0, 50.0, 256).unwrap();
    c.bench_function("autocorrelation/harmonic_j2_256pts", |b| {
        b.iter(|| autocorrelation(&ha, black_box(2.0), &grid, &policy).unwrap())
    });
}

fn unity_diagonal(c: &mut Criterion) {
    let quad = QuadraturePolicy::default();
    let ha = harmonic();
    let hy = hydrogen();
    let mu_ha = canonical_measure(&ha).unwrap();
    let mu_hy = canonical_measure(&hy).unwrap();
    let mut group = c.benchmark_group("verify_diagonal");
    group.sample_size(20);
    group.bench_function("harmonic_n50", |b| {
        b.iter(|| verify_diagonal(&ha, &mu_ha, black_box(50), &quad).unwrap())
    });
    group.bench_function("hydrogen_n50", |b| {
        b.iter(|| verify_diagonal(&hy, &mu_hy, black_box(50), &quad).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    normalization,
    state_build,
    survival,
    unity_diagonal
);
criterion_main!(benches);
