//! NSGA-III: non-dominated sorting with reference-direction niching on the
//! split front.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;

use super::{
    auto_partitions, das_dennis_directions, make_offspring, rank_and_crowding, select,
    IslandAlgorithm, StepContext,
};
use crate::error::Result;
use crate::pareto::sort_fronts;
use crate::problem::{Individual, Problem};
use crate::variation::VariationConfig;
use crate::Rng;

#[derive(Debug, Clone)]
pub struct Nsga3 {
    variation: VariationConfig,
    partitions: Option<usize>,
    directions: Vec<Vec<f64>>,
}

impl Nsga3 {
    pub fn new(variation: VariationConfig, partitions: Option<usize>) -> Self {
        Self {
            variation,
            partitions,
            directions: Vec::new(),
        }
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }
}

impl IslandAlgorithm for Nsga3 {
    fn initialize(
        &mut self,
        population: &mut Vec<Individual>,
        problem: &Problem,
        _rng: &mut Rng,
    ) -> Result<()> {
        let m = problem.n_objectives();
        let h = self
            .partitions
            .unwrap_or_else(|| auto_partitions(m, population.len()));
        self.directions = das_dennis_directions(m, h);
        Ok(())
    }

    fn step_one_generation(
        &mut self,
        population: &mut Vec<Individual>,
        ctx: &StepContext<'_>,
        rng: &mut Rng,
    ) -> Result<Vec<Individual>> {
        if self.directions.is_empty() {
            self.initialize(population, ctx.problem, rng)?;
        }
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
        let keep = niching_survival(&pool, mu, &self.directions, rng);
        *population = select(pool, &keep);
        Ok(offspring)
    }
}

/// Indices (ascending) of the `mu` survivors of `pool`.
pub(crate) fn niching_survival(
    pool: &[Individual],
    mu: usize,
    directions: &[Vec<f64>],
    rng: &mut Rng,
) -> Vec<usize> {
    let objs: Vec<&[f64]> = pool.iter().map(|i| i.objectives.as_slice()).collect();
    let mut chosen = Vec::with_capacity(mu);
    let mut last: Vec<usize> = Vec::new();
    for front in sort_fronts(&objs) {
        if chosen.len() + front.len() <= mu {
            chosen.extend(front);
            if chosen.len() == mu {
                break;
            }
        } else {
            last = front;
            break;
        }
    }
    if chosen.len() < mu && !last.is_empty() {
        let members: Vec<usize> = chosen.iter().chain(&last).copied().collect();
        let pts: Vec<&[f64]> = members.iter().map(|&i| objs[i]).collect();
        let normalized = normalize(&pts);
        let (niche, dist): (Vec<usize>, Vec<f64>) =
            normalized.iter().map(|p| associate(p, directions)).unzip();

        let mut count = vec![0usize; directions.len()];
        for &d in &niche[..chosen.len()] {
            count[d] += 1;
        }
        // candidates from the split front, by local position
        let mut waiting: Vec<Vec<usize>> = vec![Vec::new(); directions.len()];
        for k in chosen.len()..members.len() {
            waiting[niche[k]].push(k);
        }
        let mut open: Vec<usize> = (0..directions.len()).collect();
        let mut need = mu - chosen.len();
        while need > 0 && !open.is_empty() {
            let least = open.iter().map(|&d| count[d]).min().expect("non-empty");
            let ties: Vec<usize> = open
                .iter()
                .copied()
                .filter(|&d| count[d] == least)
                .collect();
            let d = ties[rng.random_range(0..ties.len())];
            if waiting[d].is_empty() {
                open.retain(|&x| x != d);
                continue;
            }
            let pick = if count[d] == 0 {
                let (pos, _) = waiting[d]
                    .iter()
                    .enumerate()
                    .min_by(|a, b| dist[*a.1].total_cmp(&dist[*b.1]))
                    .expect("non-empty");
                pos
            } else {
                rng.random_range(0..waiting[d].len())
            };
            let k = waiting[d].remove(pick);
            chosen.push(members[k]);
            count[d] += 1;
            need -= 1;
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Translates by the ideal point and scales by hyperplane intercepts
/// through the extreme points, falling back to per-axis maxima when the
/// hyperplane is degenerate.
fn normalize(pts: &[&[f64]]) -> Vec<Vec<f64>> {
    let m = pts[0].len();
    let ideal: Vec<f64> = (0..m)
        .map(|j| pts.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min))
        .collect();
    let translated: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| p.iter().zip(&ideal).map(|(a, z)| a - z).collect())
        .collect();

    let extremes: Vec<usize> = (0..m)
        .map(|j| {
            let asf = |p: &Vec<f64>| {
                p.iter()
                    .enumerate()
                    .map(|(k, v)| v / if k == j { 1.0 } else { 1e-6 })
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            (0..translated.len())
                .min_by(|&a, &b| asf(&translated[a]).total_cmp(&asf(&translated[b])))
                .expect("non-empty")
        })
        .collect();

    let maxima: Vec<f64> = (0..m)
        .map(|j| translated.iter().map(|p| p[j]).fold(0.0, f64::max))
        .collect();
    let mut intercepts =
        hyperplane_intercepts(&translated, &extremes).unwrap_or_else(|| maxima.clone());
    for (a, mx) in intercepts.iter_mut().zip(&maxima) {
        if !(*a > 1e-10) || !a.is_finite() {
            *a = *mx;
        }
        if !(*a > 1e-10) {
            *a = 1.0;
        }
    }
    translated
        .into_iter()
        .map(|p| p.iter().zip(&intercepts).map(|(v, a)| v / a).collect())
        .collect()
}

fn hyperplane_intercepts(translated: &[Vec<f64>], extremes: &[usize]) -> Option<Vec<f64>> {
    let m = extremes.len();
    let e = DMatrix::from_fn(m, m, |r, c| translated[extremes[r]][c]);
    let b = e.lu().solve(&DVector::from_element(m, 1.0))?;
    let out: Vec<f64> = b.iter().map(|v| 1.0 / v).collect();
    out.iter()
        .all(|a| a.is_finite() && *a > 1e-10)
        .then_some(out)
}

/// Nearest reference line and perpendicular distance to it.
fn associate(p: &[f64], directions: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (d, w) in directions.iter().enumerate() {
        let ww: f64 = w.iter().map(|v| v * v).sum();
        let t = p.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / ww;
        let dist = p
            .iter()
            .zip(w)
            .map(|(a, b)| (a - t * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if dist < best.1 {
            best = (d, dist);
        }
    }
    best
}
