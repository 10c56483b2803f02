use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use relbo_bench::{model, OBSERVED_DIMS};
use relbo_core::ppca::{dense_oracle_regularizer, renyi_regularizer};
use relbo_core::RenyiOrder;

fn regularizer(c: &mut Criterion) {
    let order = RenyiOrder::new(0.5).unwrap();
    let mut group = c.benchmark_group("regularizer");
    for n_x in OBSERVED_DIMS {
        let (m, x) = model(n_x);
        group.bench_with_input(BenchmarkId::new("spectral", n_x), &n_x, |b, _| {
            b.iter(|| renyi_regularizer(&m, &x, order).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("dense", n_x), &n_x, |b, _| {
            b.iter(|| dense_oracle_regularizer(&m, &x, order).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, regularizer);
criterion_main!(benches);
