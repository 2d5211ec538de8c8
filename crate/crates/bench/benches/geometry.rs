use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gbc_core::geometry::Manifold;
use gbc_core::variation::{integrate_invariant, QuadratureAtlas};

fn riemann_at_a_point(c: &mut Criterion) {
    let mut group = c.benchmark_group("riemann");
    for (label, m) in [
        ("sphere(4)", Manifold::sphere(4, 1.0)),
        (
            "perturbed_sphere(4)",
            Manifold::perturbed_sphere(4, 1.0, 0.2, 1),
        ),
    ] {
        let chart = m.chart();
        let x = vec![0.9, 1.1, 1.3, 0.4];
        group.bench_function(label, |bench| {
            bench.iter(|| chart.point(black_box(&x)).unwrap().riemann().unwrap())
        });
    }
    group.finish();
}

fn total_curvature(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate_invariant");
    group.sample_size(10);
    let atlas = QuadratureAtlas::new(Manifold::sphere(3, 1.0).chart(), 8).unwrap();
    group.bench_function("sphere(3) k=1 order 8", |bench| {
        bench.iter(|| integrate_invariant(black_box(&atlas), 1).unwrap())
    });
    let atlas =
        QuadratureAtlas::new(Manifold::perturbed_sphere(2, 1.0, 0.1, 3).chart(), 32).unwrap();
    group.bench_function("perturbed_sphere(2) k=1 order 32", |bench| {
        bench.iter(|| integrate_invariant(black_box(&atlas), 1).unwrap())
    });
    group.finish();
}

criterion_group!(benches, riemann_at_a_point, total_curvature);
criterion_main!(benches);
