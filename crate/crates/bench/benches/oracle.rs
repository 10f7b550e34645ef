use std::hint::black_box;

use clustream_bench::clustered;
use clustream_core::oracle;
use criterion::{criterion_group, criterion_main, Criterion};

fn exact(c: &mut Criterion) {
    let g = clustered(20_000);
    c.bench_function("edge_triangle_counts", |b| {
        b.iter(|| black_box(oracle::edge_triangle_counts(&g)))
    });
    c.bench_function("exact_stats", |b| {
        b.iter(|| oracle::exact_stats(&g).unwrap())
    });
}

criterion_group!(benches, exact);
criterion_main!(benches);
