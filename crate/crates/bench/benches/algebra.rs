use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gbc_core::invariants::{gauss_bonnet_curvature, lovelock_tensor};
use gbc_core::sampling::{random_bianchi, random_form, Seeds};

fn wedge(c: &mut Criterion) {
    let mut group = c.benchmark_group("wedge");
    for n in [4usize, 6, 8] {
        let mut rng = Seeds::new(1).child("bench").index(n as u64).rng();
        let a = random_form(&mut rng, n, 2, 2);
        let b = random_form(&mut rng, n, 2, 2);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| black_box(&a).wedge(black_box(&b)).unwrap())
        });
    }
    group.finish();
}

fn hodge_star(c: &mut Criterion) {
    let mut group = c.benchmark_group("hodge_star");
    for n in [4usize, 6, 8] {
        let mut rng = Seeds::new(2).child("bench").index(n as u64).rng();
        let a = random_form(&mut rng, n, n / 2, n / 2);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| black_box(&a).hodge_star())
        });
    }
    group.finish();
}

fn curvature_invariants(c: &mut Criterion) {
    let mut group = c.benchmark_group("curvature_invariants");
    for (n, k) in [(4usize, 2usize), (6, 2), (6, 3)] {
        let mut rng = Seeds::new(3).child("bench").index(n as u64).rng();
        let r = random_bianchi(&mut rng, n, 2);
        group.bench_function(format!("h n={n} k={k}"), |bench| {
            bench.iter(|| gauss_bonnet_curvature(black_box(&r), k).unwrap())
        });
        group.bench_function(format!("T n={n} k={k}"), |bench| {
            bench.iter(|| lovelock_tensor(black_box(&r), k).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, wedge, hodge_star, curvature_invariants);
criterion_main!(benches);
