use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use softsheaf::corpus;
use softsheaf::par::{self, Mode};
use softsheaf::suite::{run_criterion, SuiteConfig};
use softsheaf::ualg::congruence_lattice;

fn modes() -> [(&'static str, Mode); 2] {
    [("sequential", Mode::Sequential), ("parallel", Mode::Parallel)]
}

fn con_sweep(c: &mut Criterion) {
    let algs = corpus::small_algebras(corpus::DEFAULT_SEED, 5);
    let mut g = c.benchmark_group("con_sweep");
    for (label, mode) in modes() {
        g.bench_function(label, |b| {
            b.iter(|| par::map(mode, &algs, |a| congruence_lattice(a).unwrap().len()))
        });
    }
    g.finish();
}

fn criteria(c: &mut Criterion) {
    let mut g = c.benchmark_group("criterion");
    g.sample_size(10);
    for id in [5u8, 8, 10] {
        for (label, mode) in modes() {
            let cfg = SuiteConfig {
                mode,
                ..SuiteConfig::default()
            };
            g.bench_with_input(BenchmarkId::new(label, id), &id, |b, &id| {
                b.iter(|| black_box(run_criterion(id, &cfg).unwrap().passed()))
            });
        }
    }
    g.finish();
}

criterion_group!(benches, con_sweep, criteria);
criterion_main!(benches);
