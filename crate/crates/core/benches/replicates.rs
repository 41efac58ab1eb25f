//! Sequential vs data-parallel replicate loops on the two hot paths:
//! exact stationary weight draws and PD(α) draws.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rankdiff::pd::PdConfig;
use rankdiff::stationary::sample_stationary_weights;
use rankdiff::{DriftSpec, Execution, Streams};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn stationary_weights(c: &mut Criterion) {
    let mut group = c.benchmark_group("stationary_weights");
    for n in [100usize, 2000] {
        let spec = DriftSpec::gravity(n, 0.25).unwrap();
        for (label, exec) in MODES {
            let streams = Streams::new(1).with_execution(exec);
            group.bench_with_input(BenchmarkId::new(label, n), &n, |b, _| {
                b.iter(|| black_box(sample_stationary_weights(&spec, 256, &streams).unwrap()))
            });
        }
    }
    group.finish();
}

fn pd_draws(c: &mut Criterion) {
    let mut group = c.benchmark_group("pd_ppp");
    for alpha in [0.3, 0.7] {
        let cfg = PdConfig::ppp(alpha).unwrap();
        for (label, exec) in MODES {
            let streams = Streams::new(2).with_execution(exec);
            group.bench_with_input(BenchmarkId::new(label, alpha), &alpha, |b, _| {
                b.iter(|| black_box(streams.map(256, |_, rng| cfg.sample(rng).unwrap())))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, stationary_weights, pd_draws);
criterion_main!(benches);
