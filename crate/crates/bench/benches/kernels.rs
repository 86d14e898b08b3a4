use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use kgplanar::boxes::{self, FourBoxName, TwoBoxName};
use kgplanar::{canonicalize, enumerate_patterns, CertifyOptions, KneserGraph, SpinTensor};
use kgplanar_bench::{catalog_rank, closure_dims, SAMPLE_TUPLE};

fn dense_primitives(c: &mut Criterion) {
    let g = KneserGraph::build(5).unwrap();
    let a = boxes::two_box(TwoBoxName::A, 5).unwrap().to_dense().unwrap();
    let r = boxes::four_box(FourBoxName::R, 5).unwrap().to_dense().unwrap();
    let mut group = c.benchmark_group("dense");
    group.bench_function("tensor A x A (n=5)", |b| b.iter(|| black_box(&a).tensor_product(&a).unwrap()));
    group.bench_function("compose R R (n=5)", |b| b.iter(|| black_box(&r).compose(&r).unwrap()));
    group.bench_function("sum_out R (n=5)", |b| b.iter(|| black_box(&r).sum_out(2).unwrap()));
    group.bench_function("ones arity 4 (n=5)", |b| {
        b.iter(|| SpinTensor::ones(4, black_box(g.order())).unwrap())
    });
    group.finish();
}

fn orbits(c: &mut Criterion) {
    let mut group = c.benchmark_group("orbits");
    group.sample_size(10);
    for n in [5usize, 8] {
        group.bench_with_input(BenchmarkId::new("enumerate arity 5", n), &n, |b, &n| {
            b.iter(|| enumerate_patterns(5, n).unwrap().len())
        });
    }
    group.bench_function("canonicalize arity 6", |b| b.iter(|| canonicalize(black_box(&SAMPLE_TUPLE)).unwrap()));
    group.finish();
}

fn networks(c: &mut Criterion) {
    let mut group = c.benchmark_group("network");
    group.sample_size(10);
    for n in [7usize, 10] {
        group.bench_with_input(BenchmarkId::new("catalog matrix", n), &n, |b, &n| {
            b.iter(|| catalog_rank(n).unwrap())
        });
    }
    group.bench_function("gamma_3 (n=7)", |b| b.iter(|| boxes::gamma(3, 7).unwrap()));
    group.finish();
}

fn closure(c: &mut Criterion) {
    let mut group = c.benchmark_group("closure");
    group.sample_size(10);
    for n in [5usize, 6] {
        group.bench_with_input(BenchmarkId::new("arity 5", n), &n, |b, &n| b.iter(|| closure_dims(n, 5).unwrap()));
    }
    group.bench_function("certificate n=7", |b| {
        b.iter(|| kgplanar::decide_property_g(7, &CertifyOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, dense_primitives, orbits, networks, closure);
criterion_main!(benches);
