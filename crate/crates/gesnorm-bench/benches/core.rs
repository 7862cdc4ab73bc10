//! Criterion benchmarks for the hot paths: norm evaluation at small and
//! large n, the single-LP projection, and the rolling GES detector.

use criterion::{criterion_group, criterion_main, Criterion};
use gesnorm::anomaly::{detect, synthetic_returns, DetectorConfig, Method};
use gesnorm::{generate_instance, project_lp, scaled_ges_norm, Distortion, SplitMix64};
use std::hint::black_box;

fn bench_norm(c: &mut Criterion) {
    let g = Distortion::power(2.0).unwrap();
    let small = vec![-2.0, 1.0, 7.0, 10.0, -12.0];
    c.bench_function("norm_n5", |b| {
        b.iter(|| scaled_ges_norm(black_box(&small), 0.5, &g).unwrap())
    });

    let mut rng = SplitMix64::new(17);
    let large: Vec<f64> = (0..1000).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
    c.bench_function("norm_n1000", |b| {
        b.iter(|| scaled_ges_norm(black_box(&large), 0.95, &g).unwrap())
    });
}

fn bench_project(c: &mut Criterion) {
    let g = Distortion::power(2.0).unwrap();
    let inst = generate_instance(10, 5, 7).unwrap();
    c.bench_function("project_lp_n10_m5", |b| {
        b.iter(|| project_lp(black_box(&inst.q), &inst.polyhedron, 0.6, &g).unwrap())
    });
}

fn bench_detect(c: &mut Criterion) {
    let r = synthetic_returns(500, 0.01, &[(120, 0.3), (370, -0.3)], 99).unwrap();
    let cfg = DetectorConfig::new(Method::GesNorm);
    c.bench_function("ges_detect_len500_w30", |b| {
        b.iter(|| detect(black_box(&r), &cfg).unwrap())
    });
}

criterion_group!(benches, bench_norm, bench_project, bench_detect);
criterion_main!(benches);
