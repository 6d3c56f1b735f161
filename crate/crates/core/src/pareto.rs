//! Pareto dominance, non-dominated sorting and the individual score.
//!
//! The score of an individual `x` in a population with maximum rank `R` is
//!
//! ```text
//! S_x = (1 - rank_x / R) + (CD_x + RD_x) / (2 (R + 1))
//! ```
//!
//! where `CD` is the per-front crowding distance and `RD` the distance to
//! the nadir point, both normalized to `[0, 1]`. The diversity band is
//! narrower than the gap between consecutive ranks, so every individual of
//! rank `r` scores strictly above every individual of rank `r + 1`.

use std::cmp::Ordering;

use crate::error::{domain, Result};
use crate::problem::Individual;

/// `a` dominates `b` under minimization. Slices must have equal length.
pub fn dominates_objectives(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

pub fn dominates(a: &Individual, b: &Individual) -> Result<bool> {
    if a.objectives.len() != b.objectives.len() {
        return Err(domain(format!(
            "objective dimension mismatch: {} vs {}",
            a.objectives.len(),
            b.objectives.len()
        )));
    }
    Ok(dominates_objectives(&a.objectives, &b.objectives))
}

/// Partitions objective vectors into fronts (fast non-dominated sort).
/// Indices within a front are ascending.
pub fn sort_fronts<V: AsRef<[f64]>>(points: &[V]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (points[i].as_ref(), points[j].as_ref());
            if dominates_objectives(a, b) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates_objectives(b, a) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Indices of the non-dominated members of `points`.
pub fn non_dominated_indices<V: AsRef<[f64]>>(points: &[V]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !points
                .iter()
                .any(|q| dominates_objectives(q.as_ref(), points[i].as_ref()))
        })
        .collect()
}

/// Min-max normalization to `[0, 1]`; degenerate inputs map to 1.
pub(crate) fn min_max_normalize(values: &mut [f64]) {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if values.len() <= 1 || hi - lo <= 0.0 || !(hi - lo).is_finite() {
        values.iter_mut().for_each(|v| *v = 1.0);
    } else {
        values.iter_mut().for_each(|v| *v = (*v - lo) / (hi - lo));
    }
}

/// Normalized crowding distance of the members of one front.
///
/// Per objective, members are sorted by value; interior members accumulate
/// the gap between their neighbours divided by the objective's range in the
/// front. Members at either end of any objective are boundary members. The
/// raw sums are then min-max normalized with boundary members pinned above
/// every interior value, so boundaries get exactly 1 and interior members
/// land in `[0, 1)`.
pub fn crowding_distances<V: AsRef<[f64]>>(front: &[V]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![1.0; n];
    }
    let m = front[0].as_ref().len();
    let mut raw = vec![0.0; n];
    let mut boundary = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..m {
        order.sort_by(|&a, &b| {
            front[a].as_ref()[k]
                .partial_cmp(&front[b].as_ref()[k])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        let lo = front[order[0]].as_ref()[k];
        let hi = front[order[n - 1]].as_ref()[k];
        boundary[order[0]] = true;
        boundary[order[n - 1]] = true;
        let range = hi - lo;
        if range > 0.0 {
            for w in order.windows(3) {
                raw[w[1]] += (front[w[2]].as_ref()[k] - front[w[0]].as_ref()[k]) / range;
            }
        }
    }
    // Each per-objective term is at most 1, so m + 1 exceeds any interior sum.
    let pinned = m as f64 + 1.0;
    for (r, &b) in raw.iter_mut().zip(&boundary) {
        if b {
            *r = pinned;
        }
    }
    min_max_normalize(&mut raw);
    raw
}

/// A population partitioned into Pareto fronts.
#[derive(Debug, Clone)]
pub struct RankedPopulation {
    pub individuals: Vec<Individual>,
    /// Index lists, `fronts[0]` is rank 1.
    pub fronts: Vec<Vec<usize>>,
    pub nadir: Vec<f64>,
    pub ideal: Vec<f64>,
}

/// Sorts a population into fronts and assigns 1-based ranks.
pub fn non_dominated_sort(mut population: Vec<Individual>) -> Result<RankedPopulation> {
    if population.is_empty() {
        return Err(domain("cannot sort an empty population"));
    }
    let m = population[0].objectives.len();
    if population.iter().any(|ind| ind.objectives.len() != m) {
        return Err(domain("individuals disagree on objective count"));
    }
    let fronts = {
        let points: Vec<&[f64]> = population.iter().map(|i| i.objectives.as_slice()).collect();
        sort_fronts(&points)
    };
    for (r, front) in fronts.iter().enumerate() {
        for &i in front {
            population[i].clear_annotations();
            population[i].rank = r + 1;
        }
    }
    let mut nadir = vec![f64::NEG_INFINITY; m];
    let mut ideal = vec![f64::INFINITY; m];
    for ind in &population {
        for k in 0..m {
            nadir[k] = nadir[k].max(ind.objectives[k]);
            ideal[k] = ideal[k].min(ind.objectives[k]);
        }
    }
    Ok(RankedPopulation {
        individuals: population,
        fronts,
        nadir,
        ideal,
    })
}

impl RankedPopulation {
    pub fn max_rank(&self) -> usize {
        self.fronts.len()
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn crowding_distance(mut self) -> Self {
        for front in &self.fronts {
            let cds = {
                let pts: Vec<&[f64]> = front
                    .iter()
                    .map(|&i| self.individuals[i].objectives.as_slice())
                    .collect();
                crowding_distances(&pts)
            };
            for (&i, cd) in front.iter().zip(cds) {
                self.individuals[i].cd = cd;
            }
        }
        self
    }

    /// Euclidean distance to `nadir`, min-max normalized over the population.
    pub fn reference_distance(mut self, nadir: &[f64]) -> Result<Self> {
        if nadir.iter().any(|v| !v.is_finite()) {
            return Err(domain("nadir must be finite"));
        }
        if self
            .individuals
            .iter()
            .any(|i| i.objectives.len() != nadir.len())
        {
            return Err(domain("nadir dimension mismatch"));
        }
        let mut dist: Vec<f64> = self
            .individuals
            .iter()
            .map(|ind| {
                ind.objectives
                    .iter()
                    .zip(nadir)
                    .map(|(f, r)| (f - r) * (f - r))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        min_max_normalize(&mut dist);
        for (ind, d) in self.individuals.iter_mut().zip(dist) {
            ind.rd = d;
        }
        Ok(self)
    }

    pub fn individual_score(mut self) -> Self {
        let r_max = self.max_rank() as f64;
        let band = 2.0 * (r_max + 1.0);
        for ind in &mut self.individuals {
            ind.score = (1.0 - ind.rank as f64 / r_max) + (ind.cd + ind.rd) / band;
        }
        self
    }

    pub fn into_individuals(self) -> Vec<Individual> {
        self.individuals
    }
}

/// Rank, crowding distance, reference distance (to the population's own
/// nadir) and score in one pass.
pub fn annotate(population: Vec<Individual>) -> Result<RankedPopulation> {
    let ranked = non_dominated_sort(population)?.crowding_distance();
    let nadir = ranked.nadir.clone();
    Ok(ranked.reference_distance(&nadir)?.individual_score())
}
