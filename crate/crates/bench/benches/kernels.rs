use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use gaugekit::charges::{Charge, VectorField};
use gaugekit::gauges::{cousin_walk, Ball};
use gaugekit::geometry::{dyadic_approximation, Figure, Interval};
use gaugekit::harness::{
    gauss_green_verify, hk_integrate_adaptive, seminorm_lower_bound, singular_gauge, DivSource, Seminorm,
    SeminormQuery,
};
use gaugekit::partition::{kvadry_decomposition, subordinate_partition};
use gaugekit::rational::{int, ratio};

fn disk(level: i32) -> Figure {
    dyadic_approximation(&[ratio(1, 2), ratio(1, 2)], &ratio(3, 8), level).unwrap()
}

fn geometry(c: &mut Criterion) {
    let mut g = c.benchmark_group("perimeter");
    for level in [4, 6] {
        let f = disk(level);
        g.bench_with_input(BenchmarkId::new("disk", level), &f, |b, f| b.iter(|| black_box(f.perimeter().unwrap())));
    }
    g.finish();
}

fn gauss_green(c: &mut Criterion) {
    let u = VectorField::catalog("quadratic", 2).unwrap();
    let f = disk(5);
    c.bench_function("gauss-green/disk-5", |b| {
        b.iter(|| gauss_green_verify(black_box(&u), &f, DivSource::Symbolic, 7).unwrap().abs_error)
    });
}

fn partitions(c: &mut Criterion) {
    let root = gaugekit::geometry::DyadicCube::new(0, vec![0, 0]).unwrap();
    let balls: Vec<Ball> = [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)]
        .iter()
        .map(|&(x, y)| Ball::new(vec![x, y], 0.5).unwrap())
        .collect();
    c.bench_function("subordinate/four-balls", |b| b.iter(|| subordinate_partition(&root, black_box(&balls)).unwrap()));

    let q = Interval::new(vec![(int(1), int(2)), (int(1), int(2))]).unwrap();
    let x = [ratio(1, 3), ratio(2, 7)];
    c.bench_function("kvadry/outside-tag", |b| b.iter(|| kvadry_decomposition(&q, black_box(&x), &ratio(3, 2)).unwrap()));
}

fn one_dimensional(c: &mut Criterion) {
    let gauge = singular_gauge(0.1, 0.0).unwrap();
    let radius = gauge.line_radius();
    c.bench_function("cousin-walk/singular-0.1", |b| {
        b.iter(|| cousin_walk(0.0, 1.0, &*radius, 60, &mut |_, _, _| {}).unwrap())
    });
    let f = |x: f64| 0.5 / x.sqrt();
    c.bench_function("hk-adaptive/inverse-sqrt", |b| b.iter(|| hk_integrate_adaptive(&f, 0.0, 1.0, &[0.0], 1e-8, 1 << 24).unwrap().value));
}

fn seminorm(c: &mut Criterion) {
    let q = SeminormQuery::new(Charge::lebesgue(), vec![0.5, 0.5], 0.25, 0.1, Seminorm::P);
    c.bench_function("seminorm/lebesgue-p", |b| b.iter(|| seminorm_lower_bound(black_box(&q)).unwrap().value));
}

criterion_group!(benches, geometry, gauss_green, partitions, one_dimensional, seminorm);
criterion_main!(benches);
