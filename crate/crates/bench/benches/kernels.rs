use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use isoclust_core::exact::DEFAULT_TOL;
use isoclust_core::*;

fn solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_double_bubble");
    for a in [0.1, 10.0, 1e4, 1e6] {
        group.bench_with_input(BenchmarkId::from_parameter(a), &a, |b, &a| {
            b.iter(|| solve_double_bubble(black_box(a), DEFAULT_TOL).unwrap())
        });
    }
    group.finish();
}

fn lens_build(c: &mut Criterion) {
    let w = Window::disk(2.0);
    let mut group = c.benchmark_group("build_standard_lens");
    for n in [256, 2048] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| build_standard_lens(&w, black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn flow_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("flow_step");
    for n in [64, 2048] {
        let lens = build_standard_lens(&Window::disk(2.0), n).unwrap();
        let params = FlowParams::for_cluster(&lens);
        group.bench_with_input(BenchmarkId::from_parameter(n), &lens, |b, lens| {
            b.iter(|| step(black_box(lens), &params).unwrap())
        });
    }
    group.finish();
}

fn distance(c: &mut Criterion) {
    let w = Window::disk(2.0);
    let lens = build_standard_lens(&w, 2048).unwrap();
    let g = solve_double_bubble(1e3, DEFAULT_TOL).unwrap();
    let bubble = build_double_bubble(&g, &w, 2048).unwrap();
    let pairing: Vec<(String, String)> =
        [("D1", "E1"), ("D2", "F1"), ("D3", "F2")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    let q = QuadratureParams::default();
    c.bench_function("cluster_distance/double_bubble_vs_lens", |b| {
        b.iter(|| cluster_distance(black_box(&bubble), &lens, &w, &q, &pairing).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = solver, lens_build, flow_step, distance
}
criterion_main!(benches);
