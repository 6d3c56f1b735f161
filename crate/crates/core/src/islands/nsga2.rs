//! NSGA-II: fast non-dominated sorting with crowding-distance survival.

use super::{crowding_truncation, make_offspring, rank_and_crowding, IslandAlgorithm, StepContext};
use crate::error::Result;
use crate::problem::{Individual, Problem};
use crate::variation::VariationConfig;
use crate::Rng;

#[derive(Debug, Clone)]
pub struct Nsga2 {
    variation: VariationConfig,
}

impl Nsga2 {
    pub fn new(variation: VariationConfig) -> Self {
        Self { variation }
    }
}

impl IslandAlgorithm for Nsga2 {
    fn initialize(
        &mut self,
        _population: &mut Vec<Individual>,
        _problem: &Problem,
        _rng: &mut Rng,
    ) -> Result<()> {
        Ok(())
    }

    fn step_one_generation(
        &mut self,
        population: &mut Vec<Individual>,
        ctx: &StepContext<'_>,
        rng: &mut Rng,
    ) -> Result<Vec<Individual>> {
        let mu = population.len();
        let (rank, cd) = rank_and_crowding(population);
        let children = make_offspring(
            population,
            &rank,
            &cd,
            mu,
            &self.variation,
            ctx.problem,
            rng,
        );
        let offspring = ctx.evaluate(&children)?;
        let mut pool = std::mem::take(population);
        pool.extend(offspring.iter().cloned());
        *population = crowding_truncation(pool, mu);
        Ok(offspring)
    }
}
