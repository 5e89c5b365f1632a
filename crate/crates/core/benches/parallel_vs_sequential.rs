//! Same work on a one-thread pool and on the default rayon pool.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use npp_qaoa::anneal::{simulated_anneal, AnnealConfig};
use npp_qaoa::optim::{Algorithm, ObjectiveSpec, OptimizerConfig};
use npp_qaoa::parallel::with_workers;
use npp_qaoa::qaoa::{QaoaCircuit, DEFAULT_LAYERS};
use npp_qaoa::qubo::{build_qubo, generate_instance};
use npp_qaoa::seed::rng_from_seed;

fn pools() -> [(&'static str, usize); 2] {
    let all = std::thread::available_parallelism().map_or(1, |n| n.get());
    [("sequential", 1), ("parallel", all)]
}

fn population_step(c: &mut Criterion) {
    let inst = generate_instance(10, 3, 1, 100).unwrap();
    let model = build_qubo(&inst).unwrap();
    let circuit = QaoaCircuit::new(&model).unwrap();
    let obj = ObjectiveSpec::with_default_bounds(2 * DEFAULT_LAYERS, |x: &[f64]| circuit.objective_flat(x));
    let cfg = OptimizerConfig::with_budget(16, 5, 0);

    let mut group = c.benchmark_group("de_qaoa_n10");
    group.sample_size(10);
    for (label, workers) in pools() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &workers, |b, &w| {
            b.iter(|| {
                with_workers(w, || Algorithm::De.minimize_with(&obj, &cfg, &mut rng_from_seed(1)).unwrap())
            })
        });
    }
    group.finish();
}

fn anneal_reads(c: &mut Criterion) {
    let inst = generate_instance(12, 4, 1, 100).unwrap();
    let model = build_qubo(&inst).unwrap();
    let cfg = AnnealConfig {
        reads: 64,
        sweeps: 200,
        seed: 2,
        ..AnnealConfig::default()
    };

    let mut group = c.benchmark_group("anneal_n12");
    group.sample_size(10);
    for (label, workers) in pools() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &workers, |b, &w| {
            b.iter(|| with_workers(w, || simulated_anneal(&model, &cfg).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, population_step, anneal_reads);
criterion_main!(benches);
