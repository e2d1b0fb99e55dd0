use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mirnet_bench::{factor_returns, symbols};
use mirnet_core::lz::{self, LzConfig};
use std::hint::black_box;

fn bench_match_lengths(c: &mut Criterion) {
    let mut group = c.benchmark_group("match_lengths");
    for &n in &[1_000usize, 10_000, 100_000] {
        let seq = symbols(&factor_returns(1, n, 7), 4).remove(0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &seq, |b, s| {
            b.iter(|| lz::match_lengths(black_box(&s.symbols)).unwrap())
        });
    }
    group.finish();
}

fn bench_mutual_lz(c: &mut Criterion) {
    let seqs = symbols(&factor_returns(2, 10_000, 9), 10);
    let cfg = LzConfig::default();
    c.bench_function("mutual_lz/a10/n10000", |b| {
        b.iter(|| lz::mutual_lz(black_box(&seqs[0]), black_box(&seqs[1]), &cfg).unwrap())
    });
}

criterion_group!(benches, bench_match_lengths, bench_mutual_lz);
criterion_main!(benches);
