use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use qverify_core::catalog::{self, series};
use qverify_core::gsum::{g_eval, GParams};
use qverify_core::positivity::ScanBounds;
use qverify_core::qbinom::{BinomCache, CacheLimits};
use qverify_core::qexpr;
use qverify_core::record::FamilyParams;
use qverify_core::runner::{self, RunConfig};

fn binomials(c: &mut Criterion) {
    // a fresh cache per batch so the recurrence actually runs
    c.bench_function("qbin [40,20] uncached", |b| {
        b.iter_batched(
            || BinomCache::new(CacheLimits::default()),
            |cache| black_box(cache.get(40, 20, 1)),
            BatchSize::SmallInput,
        )
    });
    c.bench_function("G(12,12,5/2,3/2,4)", |b| b.iter(|| g_eval(black_box(&GParams::new(12, 12, 10, 6, 4)))));
}

fn families(c: &mut Criterion) {
    let fq = FamilyParams::new().with("v", 4).with("i", 2).with("L", 12);
    c.bench_function("verify FQ v=4 i=2 L=12", |b| b.iter(|| catalog::verify("FQ", black_box(&fq), 0)));
    let t11 = FamilyParams::new().with("v", 3).with("delta", 1).with("L", 8);
    c.bench_function("verify T11 v=3 delta=1 L=8", |b| b.iter(|| catalog::verify("T11", black_box(&t11), 0)));
    let mut g = c.benchmark_group("series");
    g.sample_size(10);
    g.bench_function("M20-3 sum side T=60", |b| b.iter(|| series::m20_lhs(3, black_box(60))));
    g.bench_function("expression P(q^20,q^3,q^17;q^20;inf)/P(q;q;inf) T=100", |b| {
        b.iter(|| qexpr::eval_str(black_box(&series::m20_expr(3)), 100))
    });
    g.finish();
}

fn scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("scan");
    g.sample_size(10);
    for jobs in [1, 4] {
        let cfg = RunConfig { jobs, ..RunConfig::default() };
        g.bench_function(format!("K<=3 N,M<=6 jobs={jobs}"), |b| {
            b.iter(|| runner::scan(ScanBounds::up_to(3, 6, 6), &cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, binomials, families, scan);
criterion_main!(benches);
