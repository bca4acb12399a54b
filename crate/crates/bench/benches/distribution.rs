use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use riffshuffle::exact::{exact_pmf_table, ExactParams};
use riffshuffle::sampler::{empirical_pmf, Mechanism};
use riffshuffle::Params;

fn pmf_table(c: &mut Criterion) {
    let mut g = c.benchmark_group("pmf_table");
    for m in [50, 500] {
        let params = Params::new(0.3, m).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(m), &params, |b, p| b.iter(|| black_box(p).pmf_table()));
    }
    g.finish();
}

fn exact_table(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact_pmf_table");
    for m in [20, 100] {
        let ep = ExactParams::parse("3/10", m).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(m), &ep, |b, e| b.iter(|| exact_pmf_table(black_box(e))));
    }
    g.finish();
}

fn mode(c: &mut Criterion) {
    let mut g = c.benchmark_group("mode");
    let params = Params::new(0.45, 2000).unwrap();
    g.bench_function("linear", |b| b.iter(|| black_box(&params).mode()));
    g.bench_function("bisect", |b| b.iter(|| black_box(&params).mode_bisect()));
    g.finish();
}

fn sampler(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_10k");
    let params = Params::new(0.3, 10).unwrap();
    for mech in [Mechanism::Deck, Mechanism::Trials] {
        g.bench_function(mech.to_string(), |b| b.iter(|| empirical_pmf(&params, 10_000, 7, mech).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, pmf_table, exact_table, mode, sampler);
criterion_main!(benches);
