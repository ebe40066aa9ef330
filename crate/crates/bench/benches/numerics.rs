use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

use lgpoly::fredholm::{laplace_contours, laplace_det, step_det, DetOptions};
use lgpoly::polymer::log_partition;
use lgpoly::rate::{big_f, solve_b, RateQuery};
use lgpoly::special_fn::{digamma, log_gamma};

fn special(c: &mut Criterion) {
    let z = Complex64::new(0.3, 12.5);
    c.bench_function("log_gamma", |b| b.iter(|| log_gamma(black_box(z))));
    c.bench_function("digamma", |b| b.iter(|| digamma(black_box(z))));
}

fn rate(c: &mut Criterion) {
    let q = RateQuery::new(0.5, 0.3);
    c.bench_function("solve_b", |b| b.iter(|| solve_b(black_box(&q))));
    let mut g = c.benchmark_group("slow");
    g.sample_size(10);
    g.bench_function("big_f", |b| b.iter(|| big_f(black_box(&q))));
    let (sigma, ell) = laplace_contours(0.25);
    g.bench_function("laplace_det_n2", |b| b.iter(|| laplace_det(1.0, 2, 0.25, &sigma, &ell)));
    g.bench_function("step_det_n8", |b| {
        b.iter(|| step_det(0.5, 8, 0.3, &DetOptions::quick()))
    });
    g.finish();
}

fn polymer(c: &mut Criterion) {
    c.bench_function("log_partition_n100", |b| {
        b.iter(|| log_partition(100, 0.5, black_box(1), 0))
    });
}

criterion_group!(benches, special, rate, polymer);
criterion_main!(benches);
