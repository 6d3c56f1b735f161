//! SPEA2: strength fitness with k-th nearest neighbor density. The island
//! population doubles as the external archive.

use rand::Rng as _;

use super::{select, IslandAlgorithm, StepContext};
use crate::error::Result;
use crate::pareto::dominates_objectives;
use crate::problem::{DecisionVector, Individual, Problem};
use crate::variation::{variation, VariationConfig};
use crate::Rng;

#[derive(Debug, Clone)]
pub struct Spea2 {
    variation: VariationConfig,
}

impl Spea2 {
    pub fn new(variation: VariationConfig) -> Self {
        Self { variation }
    }
}

impl IslandAlgorithm for Spea2 {
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
        let objs: Vec<&[f64]> = population.iter().map(|i| i.objectives.as_slice()).collect();
        let fit = fitness(&objs, &distance_matrix(&objs));
        let parents: Vec<&DecisionVector> = (0..mu)
            .map(|_| {
                let a = rng.random_range(0..mu);
                let b = rng.random_range(0..mu);
                let w = if fit[a] < fit[b] || (fit[a] == fit[b] && rng.random_bool(0.5)) {
                    a
                } else {
                    b
                };
                &population[w].decision
            })
            .collect();
        let children = variation(&parents, &self.variation, ctx.problem, rng);
        let offspring = ctx.evaluate(&children)?;
        let mut pool = std::mem::take(population);
        pool.extend(offspring.iter().cloned());
        let keep = environmental_selection(&pool, mu);
        *population = select(pool, &keep);
        Ok(offspring)
    }
}

fn distance_matrix(objs: &[&[f64]]) -> Vec<Vec<f64>> {
    objs.iter()
        .map(|a| {
            objs.iter()
                .map(|b| {
                    a.iter()
                        .zip(*b)
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect()
        })
        .collect()
}

/// Raw strength fitness plus density `1 / (σ_k + 2)`, `k = ⌊√n⌋`.
fn fitness(objs: &[&[f64]], dist: &[Vec<f64>]) -> Vec<f64> {
    let n = objs.len();
    let mut strength = vec![0usize; n];
    let mut dominators: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates_objectives(objs[i], objs[j]) {
                strength[i] += 1;
                dominators[j].push(i);
            }
        }
    }
    let k = ((n as f64).sqrt() as usize).min(n.saturating_sub(1));
    (0..n)
        .map(|i| {
            let raw: usize = dominators[i].iter().map(|&j| strength[j]).sum();
            let mut d: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dist[i][j]).collect();
            let sigma = if d.is_empty() {
                0.0
            } else {
                let kth = k.saturating_sub(1).min(d.len() - 1);
                *d.select_nth_unstable_by(kth, f64::total_cmp).1
            };
            raw as f64 + 1.0 / (sigma + 2.0)
        })
        .collect()
}

/// Indices (ascending) of the next archive.
pub(crate) fn environmental_selection(pool: &[Individual], mu: usize) -> Vec<usize> {
    let objs: Vec<&[f64]> = pool.iter().map(|i| i.objectives.as_slice()).collect();
    let dist = distance_matrix(&objs);
    let fit = fitness(&objs, &dist);
    let mut keep: Vec<usize> = (0..pool.len()).filter(|&i| fit[i] < 1.0).collect();
    if keep.len() < mu {
        let mut rest: Vec<usize> = (0..pool.len()).filter(|&i| fit[i] >= 1.0).collect();
        rest.sort_by(|&a, &b| fit[a].total_cmp(&fit[b]));
        keep.extend(rest.into_iter().take(mu - keep.len()));
    } else {
        // drop the member whose sorted neighbor distances are
        // lexicographically smallest; removed members are skipped in place
        let lists: Vec<Vec<(f64, usize)>> = keep
            .iter()
            .map(|&i| {
                let mut d: Vec<(f64, usize)> = keep
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| (dist[i][j], j))
                    .collect();
                d.sort_by(|a, b| a.0.total_cmp(&b.0));
                d
            })
            .collect();
        let mut alive = vec![false; pool.len()];
        for &i in &keep {
            alive[i] = true;
        }
        let mut slots: Vec<usize> = (0..keep.len()).collect();
        while slots.len() > mu {
            let live = |s: usize| lists[s].iter().filter(|e| alive[e.1]).map(|e| e.0);
            let victim = (0..slots.len())
                .min_by(|&a, &b| {
                    live(slots[a])
                        .zip(live(slots[b]))
                        .map(|(x, y)| x.total_cmp(&y))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("non-empty");
            alive[keep[slots[victim]]] = false;
            slots.remove(victim);
        }
        keep = slots.into_iter().map(|s| keep[s]).collect();
    }
    keep.sort_unstable();
    keep
}
