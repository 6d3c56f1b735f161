//! Sequential executor vs rayon pools on the same ensemble runs.
//! Build with `--no-default-features` to measure the fallback alone.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use maeo::benchmarks::{make_benchmark, make_smr_problem, BenchmarkSpec, LcoeParameters};
use maeo::ensemble::{run, EnsembleConfig};
use maeo::parallel::{Executor, Workers};
use maeo::problem::{DecisionVector, Problem};
use maeo::seeded_rng;

fn executors() -> Vec<(&'static str, Executor)> {
    let mut v = vec![("sequential", Executor::sequential())];
    if cfg!(feature = "parallel") {
        for (label, islands, evals) in [("rayon-4x1", 4, 1), ("rayon-4x2", 4, 2)] {
            v.push((
                label,
                Executor::new(Workers::new(islands, evals).unwrap()).unwrap(),
            ));
        }
    }
    v
}

fn small_config() -> EnsembleConfig {
    EnsembleConfig {
        population: 40,
        cycles: 6,
        generations: 5,
        seed: 17,
        ..EnsembleConfig::default()
    }
}

fn ensemble_runs(c: &mut Criterion) {
    let problems: Vec<(&str, Problem)> = vec![
        (
            "zdt1-30",
            make_benchmark(&BenchmarkSpec::parse("zdt1-30").unwrap()).unwrap(),
        ),
        (
            "dtlz2-10-3obj",
            make_benchmark(&BenchmarkSpec::parse("dtlz2-10-3obj").unwrap()).unwrap(),
        ),
    ];
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    for (name, problem) in &problems {
        for (label, executor) in executors() {
            group.bench_with_input(BenchmarkId::new(label, name), problem, |b, p| {
                b.iter(|| black_box(run(small_config(), p, &executor).unwrap().archive.len()))
            });
        }
    }
    group.finish();
}

fn batch_evaluation(c: &mut Criterion) {
    let problem = make_smr_problem(LcoeParameters::default()).unwrap();
    let mut rng = seeded_rng(5);
    let batch: Vec<DecisionVector> = (0..2000)
        .map(|_| problem.random_decision(&mut rng))
        .collect();
    let mut group = c.benchmark_group("evaluate_all");
    for (label, executor) in executors() {
        group.bench_function(label, |b| {
            b.iter(|| black_box(executor.evaluate_all(&problem, &batch).unwrap().len()))
        });
    }
    group.finish();
}

criterion_group!(benches, ensemble_runs, batch_evaluation);
criterion_main!(benches);
