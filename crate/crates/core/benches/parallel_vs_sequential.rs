use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qkm_core::gas_sim::{run_batch, run_trace, seed_batch, InitMode, SimConfig, WallKind};
use qkm_core::physcore::species_lookup;
use qkm_core::randomness::{rng_list, score_corpus, Estimator};
use qkm_core::thermostatics::{grid, sweep, GasSpec, Spacing, Statistics, SweepVar};
use qkm_core::Exec;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn bench_sweep(c: &mut Criterion) {
    let base = GasSpec::new(10.0, 1.8e-4, 1.7e16, species_lookup("he3").unwrap(), Statistics::Fermi).unwrap();
    let temps = grid(1.0, 300.0, 100_000, Spacing::Log).unwrap();
    let mut g = c.benchmark_group("sweep_1e5");
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| sweep(&base, SweepVar::T, &temps, exec)));
    }
    g.finish();
}

fn bench_corpus(c: &mut Criterion) {
    let lists: Vec<_> = (0..16).map(|s| rng_list(7693, s).unwrap()).collect();
    let mut g = c.benchmark_group("score_corpus_16x1e5bits");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| score_corpus(&lists, &Estimator::ALL, exec).unwrap())
        });
    }
    g.finish();
}

fn bench_seeds(c: &mut Criterion) {
    let he3 = species_lookup("he3").unwrap();
    let config = SimConfig::cube(1000, 0.035, 10.0, he3, WallKind::random_sites(), 0);
    let seeds = seed_batch(0, 8);
    let mut g = c.benchmark_group("sim_8_seeds_n1000");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_batch(exec, &seeds, |s| run_trace(&config.with_seed(s), InitMode::Beam).unwrap().0))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_sweep, bench_corpus, bench_seeds);
criterion_main!(benches);
