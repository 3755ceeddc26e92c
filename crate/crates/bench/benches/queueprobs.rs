use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tandem_bench::fixtures;
use tandem_core::queueprobs::{kt00_sum31, kt00_sum32, kt_general, mm1_kt};
use tandem_core::simulator::{simulate_queue_prob, uniformization_kt, CtmcTruncation, SimConfig};
use tandem_core::{Hp, QueueState, Real};

fn kt00(c: &mut Criterion) {
    let mut g = c.benchmark_group("kt00");
    for (name, nu) in fixtures() {
        g.bench_with_input(BenchmarkId::new("sum31", name), &nu, |b, nu| {
            b.iter(|| kt00_sum31(black_box(&1.0), nu, 1e-10).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sum32", name), &nu, |b, nu| {
            b.iter(|| kt00_sum32(black_box(&1.0), nu, 1e-10).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sum32-hp-t100", name), &nu, |b, nu| {
            let t = Hp::from_f64(100.0);
            b.iter(|| kt00_sum32(black_box(&t), nu, 1e-30).unwrap())
        });
    }
    g.finish();
}

fn general(c: &mut Criterion) {
    let mut g = c.benchmark_group("kt");
    g.sample_size(20);
    for (name, nu) in fixtures().into_iter().take(2) {
        let q = QueueState::new(vec![1; nu.stations()]).unwrap();
        let q2 = QueueState::zero(nu.stations());
        g.bench_with_input(BenchmarkId::new("intertwining", name), &nu, |b, nu| {
            b.iter(|| kt_general(&q, &q2, black_box(&1.0), nu, 1e-10).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("uniformization-cap40", name), &nu, |b, nu| {
            b.iter(|| uniformization_kt(&q, &q2, black_box(1.0), nu, &mut CtmcTruncation::new(40), 1e-8).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("monte-carlo-1e4", name), &nu, |b, nu| {
            let cfg = SimConfig::new(nu.clone(), 1, 10_000, 1.0).unwrap();
            b.iter(|| simulate_queue_prob(&q, &q2, black_box(1.0), &cfg).unwrap())
        });
    }
    g.finish();
}

fn mm1(c: &mut Criterion) {
    c.bench_function("mm1/t1", |b| b.iter(|| mm1_kt(black_box(2), 3, 1.0, 1.0, 2.0)));
    c.bench_function("mm1/t200", |b| b.iter(|| mm1_kt(black_box(2), 3, 200.0, 1.0, 2.0)));
}

criterion_group!(benches, kt00, general, mm1);
criterion_main!(benches);
