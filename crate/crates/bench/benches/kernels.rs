use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tandem_bench::fixtures;
use tandem_core::kernels::{noncrossing_prob, noncrossing_prob_pointwise, phi_direct, phi_via_intertwining};
use tandem_core::symfunc::{schur, SchurMethod};
use tandem_core::{Exact, Hp, Real, WeylPoint};

fn noncrossing(c: &mut Criterion) {
    let mut g = c.benchmark_group("noncrossing");
    for (name, nu) in fixtures() {
        let x = WeylPoint::zero(nu.len());
        g.bench_with_input(BenchmarkId::new("chain", name), &nu, |b, nu| {
            b.iter(|| noncrossing_prob(&x, black_box(&1.0), nu, 1e-10).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("chain-hp", name), &nu, |b, nu| {
            let t = Hp::from_f64(1.0);
            b.iter(|| noncrossing_prob(&x, black_box(&t), nu, 1e-20).unwrap())
        });
        if nu.len() <= 3 {
            g.bench_with_input(BenchmarkId::new("pointwise", name), &nu, |b, nu| {
                b.iter(|| noncrossing_prob_pointwise(&x, black_box(&1.0), nu, 1e-10).unwrap())
            });
        }
    }
    g.finish();
}

fn departures(c: &mut Criterion) {
    let mut g = c.benchmark_group("phi");
    for (name, nu) in fixtures() {
        let n = nu.len();
        let d = WeylPoint::new((0..n as i64).rev().collect()).unwrap();
        let d2 = d.shifted(2);
        g.bench_with_input(BenchmarkId::new("direct", name), &nu, |b, nu| {
            b.iter(|| phi_direct::<f64>(&d, &d2, black_box(&1.0), nu).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("intertwining", name), &nu, |b, nu| {
            b.iter(|| phi_via_intertwining(&d, &d2, black_box(&1.0), nu, 1e-10).unwrap())
        });
    }
    g.finish();
}

fn schur_methods(c: &mut Criterion) {
    let alpha: Vec<Exact> = (1..=5).map(|k| Exact::new(k.into(), (k + 2).into())).collect();
    let z = WeylPoint::new(vec![6, 4, 3, 1, 0]).unwrap();
    c.bench_function("schur/gt-sum", |b| b.iter(|| schur::<Exact>(black_box(&z), &alpha, SchurMethod::GtSum)));
    c.bench_function("schur/determinant", |b| {
        b.iter(|| schur::<Exact>(black_box(&z), &alpha, SchurMethod::Determinant))
    });
}

criterion_group!(benches, noncrossing, departures, schur_methods);
criterion_main!(benches);
