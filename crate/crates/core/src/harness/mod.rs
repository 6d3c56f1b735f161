//! Run configurations, multi-seed campaigns, Wilcoxon comparisons and the
//! CSV/JSON artifacts they leave on disk.

pub mod campaign;
pub mod config;
pub mod output;
pub mod wilcoxon;

use rand::RngCore as _;

pub use campaign::{
    execute, run_campaign, Comparison, ComparisonReport, ProblemReference, RunRecord,
};
pub use config::{Contender, Indicator, KeyValues, RunConfig, SingleConfig};
pub use wilcoxon::{wilcoxon_signed_rank, Verdict, WilcoxonResult};

use crate::ensemble::{self, final_fronts, stream_rng, Archive, IslandSummary, RunResult};
use crate::error::Result;
use crate::islands::Island;
use crate::parallel::Executor;
use crate::problem::Problem;

/// Runs one algorithm alone for `generations` generations. The island is
/// seeded exactly like the ensemble's first island.
pub fn run_single(
    config: &SingleConfig,
    problem: &Problem,
    seed: u64,
    executor: &Executor,
) -> Result<RunResult> {
    config.validate()?;
    let island_seed = stream_rng(seed, 1).next_u64();
    let mut island = Island::new(
        config.algorithm.clone(),
        problem,
        config.population,
        island_seed,
        executor,
    )?;
    let mut archive = Archive::default();
    for ind in &island.population {
        archive.insert(ind);
    }
    for ind in &island.step_generations(problem, config.generations, executor)? {
        archive.insert(ind);
    }
    let (pareto_set, final_front) = final_fronts(&island.population);
    let evaluations = island.evaluations();
    Ok(RunResult {
        pareto_set,
        final_front,
        archive: archive.into_members(),
        cycles: Vec::new(),
        islands: vec![IslandSummary {
            id: island.spec.id.clone(),
            active: true,
            population: island.population.len(),
            evaluations,
        }],
        evaluations,
        offspring_evaluations: evaluations - config.population,
        evaluated: None,
    })
}

/// Runs a contender on `problem` with the given seed.
pub fn run_contender(
    contender: &Contender,
    problem: &Problem,
    seed: u64,
    executor: &Executor,
) -> Result<RunResult> {
    match contender {
        Contender::Maeo(cfg) => {
            let mut cfg = cfg.clone();
            cfg.seed = seed;
            ensemble::run(cfg, problem, executor)
        }
        Contender::Single(s) => run_single(s, problem, seed, executor),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{make_benchmark, BenchmarkSpec};
    use crate::islands::{AlgorithmKind, IslandAlgorithmSpec};

    fn single(kind: AlgorithmKind) -> SingleConfig {
        SingleConfig {
            algorithm: IslandAlgorithmSpec::new(kind.to_string(), kind),
            population: 20,
            generations: 5,
        }
    }

    #[test]
    fn single_budget_is_exact() {
        let p = make_benchmark(&BenchmarkSpec::zdt(1, 10).unwrap()).unwrap();
        for kind in [
            AlgorithmKind::Nsga2,
            AlgorithmKind::RandomSearch,
            AlgorithmKind::MoeadLite,
        ] {
            let cfg = single(kind);
            let r = run_single(&cfg, &p, 3, &Executor::sequential()).unwrap();
            assert_eq!(r.evaluations, cfg.evaluation_budget());
            assert_eq!(r.offspring_evaluations, 20 * 5);
            assert!(!r.archive.is_empty());
        }
    }

    #[test]
    fn single_is_deterministic() {
        let p = make_benchmark(&BenchmarkSpec::zdt(2, 10).unwrap()).unwrap();
        let cfg = single(AlgorithmKind::Spea2);
        let a = run_single(&cfg, &p, 9, &Executor::sequential()).unwrap();
        let b = run_single(&cfg, &p, 9, &Executor::sequential()).unwrap();
        assert_eq!(a, b);
    }
}
