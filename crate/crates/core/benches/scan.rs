//! Parallel-vs-sequential timing for the hot paths: block construction,
//! the per-p block scan, and the Monte-Carlo oracle.
//!
//! With the default `parallel` feature the same work is measured on a
//! single-thread rayon pool and on the default pool; building with
//! `--no-default-features` benches the plain sequential code path instead.

use criterion::{criterion_group, criterion_main, Criterion};

use mdm_core::eig::{BlockScanner, ScanParams};
use mdm_core::numerics::LogFactorialTable;
use mdm_core::operator::build_rf;
use mdm_core::oracle::mc_fidelities;
use mdm_core::schmidt::tmsv;

fn scan_once(scanner: &BlockScanner, p: f64) -> f64 {
    scanner.scan(p).unwrap().lambda_max
}

#[cfg(feature = "parallel")]
fn run_modes<F: Fn() -> f64 + Sync>(c: &mut Criterion, name: &str, work: F) {
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| single.install(|| std::hint::black_box(work())))
    });
    group.bench_function("parallel", |b| b.iter(|| std::hint::black_box(work())));
    group.finish();
}

#[cfg(not(feature = "parallel"))]
fn run_modes<F: Fn() -> f64 + Sync>(c: &mut Criterion, name: &str, work: F) {
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| std::hint::black_box(work())));
    group.finish();
}

fn bench_block_build(c: &mut Criterion) {
    let dim = 400;
    let table = LogFactorialTable::for_blocks(dim, 0);
    run_modes(c, "build_rf_400", move || {
        build_rf(&table, 0, dim).unwrap().entry(0, 0)
    });
}

fn bench_block_scan(c: &mut Criterion) {
    let scanner = BlockScanner::new(ScanParams::with_dim(120, 8)).unwrap();
    run_modes(c, "block_scan_120x8", move || scan_once(&scanner, 0.5));
}

fn bench_mc_oracle(c: &mut Criterion) {
    let state = tmsv(0.6, 40).unwrap().state;
    run_modes(c, "mc_oracle_100k", move || {
        mc_fidelities(&state, 100_000, 42).unwrap().f
    });
}

criterion_group!(benches, bench_block_build, bench_block_scan, bench_mc_oracle);
criterion_main!(benches);
