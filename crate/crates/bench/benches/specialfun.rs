use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use fhj_bench::order;
use fhj_core::specialfun::{erfc, gamma, mittag_leffler, wright, wright_normalization, WrightQuadrature};

fn bench(c: &mut Criterion) {
    let a = order(0.5);
    c.bench_function("gamma(7.3)", |b| b.iter(|| gamma(black_box(7.3))));
    c.bench_function("erfc(1.7)", |b| b.iter(|| erfc(black_box(1.7))));
    let mut g = c.benchmark_group("mittag_leffler");
    for z in [-0.5, -4.0, -15.0] {
        g.bench_function(format!("z={z}"), |b| b.iter(|| mittag_leffler(a, black_box(z))));
    }
    g.finish();
    let mut g = c.benchmark_group("wright");
    for z in [0.5, 3.0, 10.0] {
        g.bench_function(format!("z=-{z}"), |b| b.iter(|| wright(a, black_box(-z))));
    }
    g.finish();
    let q = WrightQuadrature::default();
    c.bench_function("wright_normalization(0.8)", |b| {
        b.iter(|| wright_normalization(order(0.8), &q))
    });
}

criterion_group!(benches, bench);
criterion_main!(benches);
