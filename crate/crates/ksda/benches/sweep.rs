//! Sequential vs parallel sweeps over the exhaustive input space.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ksda::corpus::fixture;
use ksda::engine::{cross_check_with, RunOptions};
use ksda::par::{self, Exec};
use ksda::scspace::procedure_p;

fn cross_check_labc(c: &mut Criterion) {
    let good = fixture("labc").unwrap().sda();
    let wrong = fixture("labc_wrong").unwrap().sda();
    let mut g = c.benchmark_group("cross_check labc vs labc_wrong, |x| <= 8");
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| cross_check_with(exec, &good, &wrong, &['a', 'b', 'c'], 8).unwrap())
        });
    }
    g.finish();
}

fn ladder_zigzag(c: &mut Criterion) {
    let m = fixture("zigzag").unwrap().sda();
    let inputs: Vec<String> = [8, 16, 32, 64, 128].iter().map(|&n| "ab".chars().cycle().take(n).collect()).collect();
    let mut g = c.benchmark_group("procedure P ladder on zigzag");
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| par::map(exec, &inputs, |x| procedure_p(&m, x, None).unwrap().stats.peak_markers))
        });
    }
    g.finish();
    // keep the engine baseline in view
    c.bench_function("run zigzag n=128", |b| b.iter(|| ksda::engine::run(&m, &inputs[4], &RunOptions::default()).unwrap()));
}

criterion_group!(benches, cross_check_labc, ladder_zigzag);
criterion_main!(benches);
