use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gelfand_core::maps::{choi_min_eigenvalue, classify, transpose_map};
use gelfand_core::random::{random_hermitian, random_pu_map, random_stochastic, rng};
use gelfand_core::{from_pu, herm_eig, to_pu, verify_triangle, AlgebraSignature};

fn eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("herm_eig");
    for n in [2, 4, 8, 16] {
        let h = random_hermitian(n, &mut rng(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| b.iter(|| herm_eig(black_box(h)).unwrap()));
    }
    group.finish();
}

fn classification(c: &mut Criterion) {
    let sig = AlgebraSignature::new(vec![1, 2]).unwrap();
    let f = random_pu_map(&sig, &sig, &mut rng(1)).unwrap();
    c.bench_function("classify C+M2 -> C+M2", |b| b.iter(|| classify(black_box(&f))));
    let t = transpose_map(3).unwrap();
    c.bench_function("choi transpose M3", |b| b.iter(|| choi_min_eigenvalue(black_box(&t)).unwrap()));
}

fn conversions(c: &mut Criterion) {
    let k = random_stochastic(6, 6, &mut rng(2));
    let h = to_pu(&k);
    c.bench_function("from_pu 6x6", |b| b.iter(|| from_pu(black_box(&h)).unwrap()));
}

fn triangle(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_triangle");
    group.sample_size(10);
    for blocks in [vec![1, 1, 1], vec![2], vec![2, 2]] {
        let sig = AlgebraSignature::new(blocks).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(&sig), &sig, |b, sig| {
            b.iter(|| verify_triangle(sig, 10, 0).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, eigensolver, classification, conversions, triangle);
criterion_main!(benches);
