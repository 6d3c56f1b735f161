//! MOEA/D-lite: Tchebycheff decomposition with one subproblem per member.
//!
//! Offspring of a generation are produced first and evaluated as a batch,
//! then applied to their neighborhoods in subproblem order. When migration
//! changes the population size the weight set is rebuilt and members are
//! greedily reassigned to the weights they fit best.

use rand::Rng as _;

use super::{
    auto_partitions, das_dennis_directions, random_simplex_point, shuffle, IslandAlgorithm,
    StepContext,
};
use crate::error::Result;
use crate::problem::{DecisionVector, Individual, Problem};
use crate::variation::{vary_pair, VariationConfig};
use crate::Rng;

/// Probability of mating within the neighborhood.
const NEIGHBOR_MATING: f64 = 0.9;
/// Most members one child may replace.
const MAX_REPLACEMENTS: usize = 2;

#[derive(Debug, Clone)]
pub struct MoeadLite {
    variation: VariationConfig,
    neighborhood: usize,
    weights: Vec<Vec<f64>>,
    neighbors: Vec<Vec<usize>>,
    ideal: Vec<f64>,
}

impl MoeadLite {
    pub fn new(variation: VariationConfig, neighborhood: usize) -> Self {
        Self {
            variation,
            neighborhood,
            weights: Vec::new(),
            neighbors: Vec::new(),
            ideal: Vec::new(),
        }
    }

    fn rebuild(&mut self, population: &mut Vec<Individual>, m: usize, rng: &mut Rng) {
        let n = population.len();
        let mut weights = das_dennis_directions(m, auto_partitions(m, n));
        weights.truncate(n);
        while weights.len() < n {
            weights.push(random_simplex_point(m, rng));
        }
        self.ideal = ideal_of(population);

        // greedy: each weight in turn takes its best remaining member
        let mut pool: Vec<Option<Individual>> = population.drain(..).map(Some).collect();
        for w in &weights {
            let (best, _) = pool
                .iter()
                .enumerate()
                .filter_map(|(k, s)| {
                    s.as_ref()
                        .map(|ind| (k, tchebycheff(&ind.objectives, w, &self.ideal)))
                })
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("as many members as weights");
            population.push(pool[best].take().expect("present"));
        }

        let t = self.neighborhood.min(n);
        self.neighbors = weights
            .iter()
            .map(|w| {
                let mut order: Vec<(f64, usize)> = weights
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        (
                            w.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(),
                            j,
                        )
                    })
                    .collect();
                order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                order.into_iter().take(t).map(|(_, j)| j).collect()
            })
            .collect();
        self.weights = weights;
    }
}

fn ideal_of(population: &[Individual]) -> Vec<f64> {
    let m = population[0].objectives.len();
    (0..m)
        .map(|j| {
            population
                .iter()
                .map(|i| i.objectives[j])
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// `max_j w_j |f_j - z_j|`, with zero weights replaced by 1e-6.
pub(crate) fn tchebycheff(f: &[f64], w: &[f64], ideal: &[f64]) -> f64 {
    f.iter()
        .zip(w)
        .zip(ideal)
        .map(|((fj, wj), zj)| wj.max(1e-6) * (fj - zj).abs())
        .fold(f64::NEG_INFINITY, f64::max)
}

impl IslandAlgorithm for MoeadLite {
    fn initialize(
        &mut self,
        population: &mut Vec<Individual>,
        problem: &Problem,
        rng: &mut Rng,
    ) -> Result<()> {
        self.rebuild(population, problem.n_objectives(), rng);
        Ok(())
    }

    fn step_one_generation(
        &mut self,
        population: &mut Vec<Individual>,
        ctx: &StepContext<'_>,
        rng: &mut Rng,
    ) -> Result<Vec<Individual>> {
        if self.weights.len() != population.len() {
            self.rebuild(population, ctx.problem.n_objectives(), rng);
        }
        let n = population.len();
        let mut scopes = Vec::with_capacity(n);
        let mut children: Vec<DecisionVector> = Vec::with_capacity(n);
        for i in 0..n {
            let local = rng.random::<f64>() < NEIGHBOR_MATING && self.neighbors[i].len() > 1;
            let pick = |rng: &mut Rng| {
                if local {
                    self.neighbors[i][rng.random_range(0..self.neighbors[i].len())]
                } else {
                    rng.random_range(0..n)
                }
            };
            let (a, b) = (pick(rng), pick(rng));
            let (c, _) = vary_pair(
                population[a].decision.genes(),
                population[b].decision.genes(),
                &self.variation,
                ctx.problem,
                rng,
            );
            children.push(DecisionVector::new(c));
            scopes.push(local);
        }
        let offspring = ctx.evaluate(&children)?;
        for (i, child) in offspring.iter().enumerate() {
            for (z, f) in self.ideal.iter_mut().zip(&child.objectives) {
                *z = z.min(*f);
            }
            let mut candidates: Vec<usize> = if scopes[i] {
                self.neighbors[i].clone()
            } else {
                (0..n).collect()
            };
            shuffle(&mut candidates, rng);
            let mut replaced = 0;
            for j in candidates {
                if replaced >= MAX_REPLACEMENTS {
                    break;
                }
                let w = &self.weights[j];
                if tchebycheff(&child.objectives, w, &self.ideal)
                    <= tchebycheff(&population[j].objectives, w, &self.ideal)
                {
                    population[j] = child.clone();
                    replaced += 1;
                }
            }
        }
        Ok(offspring)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tchebycheff_is_weighted_max() {
        assert_eq!(tchebycheff(&[1.0, 3.0], &[0.5, 0.5], &[0.0, 0.0]), 1.5);
        assert!((tchebycheff(&[2.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]) - 2e-6).abs() < 1e-18);
    }
}
