//! Elitist random search: uniform samples, crowding truncation.

use super::{crowding_truncation, IslandAlgorithm, StepContext};
use crate::error::Result;
use crate::problem::{Individual, Problem};
use crate::Rng;

#[derive(Debug, Clone, Copy, Default)]
pub struct RandomSearch;

impl IslandAlgorithm for RandomSearch {
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
        let samples: Vec<_> = (0..mu).map(|_| ctx.problem.random_decision(rng)).collect();
        let offspring = ctx.evaluate(&samples)?;
        let mut pool = std::mem::take(population);
        pool.extend(offspring.iter().cloned());
        *population = crowding_truncation(pool, mu);
        Ok(offspring)
    }
}
