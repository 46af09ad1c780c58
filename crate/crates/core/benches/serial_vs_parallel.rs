use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use meanbounds::inequalities::check_batch;
use meanbounds::proof_aux::{aux_sign_check, Axis, AuxFunctionId, GridSpec};
use meanbounds::search::{counterexample_hunt, SearchBudget};
use meanbounds::{CheckOptions, CheckParams, Configuration, Execution, InequalityId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("serial", Execution::Serial), ("parallel", Execution::Parallel)];

fn random_configs(count: usize) -> Vec<Configuration> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    (0..count)
        .map(|_| {
            let n = rng.random_range(2..=8);
            let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = w.iter().sum();
            Configuration::normalized(x, w.iter().map(|v| v / total).collect(), 1e-9).unwrap()
        })
        .collect()
}

fn bench_check_batch(c: &mut Criterion) {
    let configs = random_configs(20_000);
    let params = CheckParams::triple(1.0, 0.5, 0.0, 1.0);
    let opts = CheckOptions::default();
    let mut g = c.benchmark_group("check_batch_20k");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| check_batch(InequalityId::DianandaUpper11, black_box(&configs), &params, &opts, exec))
        });
    }
    g.finish();
}

fn bench_sign_check(c: &mut Criterion) {
    let mut grid = GridSpec::new();
    grid.insert("r".into(), Axis::closed(4.0, 10.0, 300));
    grid.insert("t".into(), Axis::open(0.0, 1.0, 300));
    let mut g = c.benchmark_group("sign_check_chain_90k");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| aux_sign_check(AuxFunctionId::Chain32, black_box(&grid), exec).unwrap())
        });
    }
    g.finish();
}

fn bench_hunt(c: &mut Criterion) {
    let budget = SearchBudget { max_evals: 20_000, seed: 1, ..SearchBudget::default() };
    let params = CheckParams::order(2.5);
    let mut g = c.benchmark_group("hunt_20k_evals");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| counterexample_hunt(InequalityId::MGSigmaUpper15, &params, black_box(&budget), exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_check_batch, bench_sign_check, bench_hunt);
criterion_main!(benches);
