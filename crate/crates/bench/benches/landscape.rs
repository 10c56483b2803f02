use criterion::{criterion_group, criterion_main, Criterion};
use relbo_bench::coarse_grid;
use relbo_core::gm::{ibar_closed, ibar_oracle, sweep, BivariateParams, PriorParams};
use relbo_core::RenyiOrder;

fn landscape(c: &mut Criterion) {
    let order = RenyiOrder::new(0.5).unwrap();
    let params = BivariateParams::standard(0.8).unwrap();
    let prior = PriorParams::new(0.5, 0.8).unwrap();
    c.bench_function("ibar_closed", |b| {
        b.iter(|| ibar_closed(order, &params, &prior).unwrap())
    });
    c.bench_function("ibar_oracle_64_nodes", |b| {
        b.iter(|| ibar_oracle(order, &params, &prior, 64).unwrap())
    });
    let grid = coarse_grid();
    c.bench_function("coarse_sweep", |b| b.iter(|| sweep(&grid).unwrap()));
}

criterion_group!(benches, landscape);
criterion_main!(benches);
