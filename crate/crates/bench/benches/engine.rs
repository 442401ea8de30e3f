use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sortition_bench::fixture;
use sortition_core::experiments::{run_scenario_traced, Trace};
use sortition_core::{presets, select_active, step};

fn engine_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for (n, n_act) in [(8, 5), (100, 25), (1000, 250)] {
        let (state, contributions, params) = fixture(n, n_act, 7);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            b.iter(|| step(black_box(&state), &contributions, &params, &mut rng).unwrap())
        });
    }
    group.finish();
}

fn selection(c: &mut Criterion) {
    let mut group = c.benchmark_group("select_active");
    for (n, n_act) in [(100, 25), (1000, 250)] {
        let (state, _, params) = fixture(n, n_act, 11);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            b.iter(|| select_active(black_box(&state), &params, &mut rng).unwrap())
        });
    }
    group.finish();
}

fn scenarios(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_scenario");
    group.sample_size(10);
    for cfg in [
        presets::small_pool(),
        presets::large_pool(),
        presets::evolving_pool(),
    ] {
        group.bench_function(cfg.label.clone(), |b| {
            b.iter(|| run_scenario_traced(black_box(&cfg), Trace::Means).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, engine_step, selection, scenarios);
criterion_main!(benches);
