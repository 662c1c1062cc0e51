use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use possverif::compare::{compare, CompareSettings};
use possverif::diagnostics::{reliability_curve_with, tau_grid};
use possverif::scorecard::score_all_with;
use possverif::synthgen::{generate, generate_with, SynthConfig};
use possverif::{Execution, Universe};

const SIZES: [usize; 2] = [800, 20_000];
const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn bench_generate(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate");
    for n in SIZES {
        let config = SynthConfig::default().with_n(n);
        group.throughput(Throughput::Elements(n as u64));
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &config, |b, cfg| {
                b.iter(|| generate_with(black_box(cfg), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_score(c: &mut Criterion) {
    let mut group = c.benchmark_group("score_all");
    for n in SIZES {
        let pairs = generate(&SynthConfig::default().with_n(n)).unwrap().pairs();
        group.throughput(Throughput::Elements(n as u64));
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &pairs, |b, p| {
                b.iter(|| score_all_with(black_box(p), exec))
            });
        }
    }
    group.finish();
}

fn bench_reliability(c: &mut Criterion) {
    let mut group = c.benchmark_group("reliability");
    let taus = tau_grid(0.05).unwrap();
    for n in SIZES {
        let pairs = generate(&SynthConfig::default().with_n(n)).unwrap().pairs();
        group.throughput(Throughput::Elements(n as u64));
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &pairs, |b, p| {
                b.iter(|| reliability_curve_with(black_box(p), &taus, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_compare(c: &mut Criterion) {
    let mut group = c.benchmark_group("compare_bootstrap");
    group.sample_size(10);
    let universe = Universe::spc();
    let base = generate(&SynthConfig::default().with_seed(1))
        .unwrap()
        .pairs();
    let cand = generate(&SynthConfig::default().with_seed(2))
        .unwrap()
        .pairs();
    for (name, exec) in MODES {
        let settings = CompareSettings {
            resamples: 200,
            paired: false,
            execution: exec,
            ..CompareSettings::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| compare(black_box(&base), black_box(&cand), &universe, &settings).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_generate,
    bench_score,
    bench_reliability,
    bench_compare
);
criterion_main!(benches);
