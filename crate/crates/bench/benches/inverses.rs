use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ginv_bench::{fixture, SIZES};
use ginv_core::{core_nilpotent, drazin, drazin_oracle, gd1, onegd, pinv, verify, ToleranceConfig};
use std::hint::black_box;

fn inverses(c: &mut Criterion) {
    let cfg = ToleranceConfig::default();
    let mut group = c.benchmark_group("inverses");
    for n in SIZES {
        let (t, tm) = fixture(n);
        group.bench_with_input(BenchmarkId::new("pinv", n), &t, |b, t| b.iter(|| pinv(black_box(t), &cfg)));
        group.bench_with_input(BenchmarkId::new("core_nilpotent", n), &t, |b, t| {
            b.iter(|| core_nilpotent(black_box(t), &cfg).unwrap())
        });
        group
            .bench_with_input(BenchmarkId::new("drazin", n), &t, |b, t| b.iter(|| drazin(black_box(t), &cfg).unwrap()));
        group.bench_with_input(BenchmarkId::new("drazin_oracle", n), &t, |b, t| {
            b.iter(|| drazin_oracle(black_box(t), &cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("gd1", n), &t, |b, t| b.iter(|| gd1(black_box(t), &tm, &cfg).unwrap()));
        group.bench_with_input(BenchmarkId::new("onegd", n), &t, |b, t| {
            b.iter(|| onegd(black_box(t), &tm, &cfg).unwrap())
        });
    }
    group.finish();
}

fn registry(c: &mut Criterion) {
    let cfg = ToleranceConfig::default();
    let (t, tm) = fixture(8);
    c.bench_function("check thm-gd1-powers n=8", |b| {
        b.iter(|| verify::check("thm-gd1-powers", black_box(&t), &tm, None, &cfg).unwrap())
    });
    let mut group = c.benchmark_group("fuzz");
    group.sample_size(10);
    group.bench_function("31 statements x 10 instances", |b| {
        b.iter(|| verify::fuzz(2..=8, 0..=3, 10, black_box(1), &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, inverses, registry);
criterion_main!(benches);
