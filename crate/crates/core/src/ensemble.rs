//! The ensemble engine: islands alternate between an evolution phase and a
//! migration phase.
//!
//! Migration runs in four steps. Each island's hypervolume is measured
//! against the global feasible nadir (population evaluation); min–max
//! normalized HV sets how many members each island owes (debt settlement);
//! the lowest-scoring members are pooled (member exportation); the pool is
//! dealt out by a multinomial draw that favors strong islands (destination
//! selection). Emptied islands are disabled for good. For the last cycles
//! (convergence assist) everything merges into the best island.

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, CycleStats, IslandCycleStats, MobilityMatrix, Phase};
use crate::error::{Error, Result};
use crate::indicators::{hv, nadir_of, FrontSet};
use crate::islands::{default_ensemble, Island, IslandAlgorithmSpec};
use crate::parallel::Executor;
use crate::pareto::{annotate, dominates_objectives, non_dominated_indices};
use crate::problem::{Individual, Problem};
use crate::Rng;

/// Stream ids carved out of the run seed.
const ENSEMBLE_STREAM: u64 = 0;
const HV_STREAM: u64 = u64::MAX;

/// Random stream `stream` of `seed`; islands use streams `1..=I`.
pub fn stream_rng(seed: u64, stream: u64) -> Rng {
    let mut rng = Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub islands: Vec<IslandAlgorithmSpec>,
    /// Initial population per island.
    pub population: usize,
    pub cycles: usize,
    pub generations: usize,
    /// Fraction of cycles run solo by the best island, in `[0, 1)`.
    pub convergence_assist: f64,
    pub seed: u64,
    /// Keep every evaluated individual in the result.
    pub record_evaluations: bool,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            islands: default_ensemble(),
            population: 100,
            cycles: 20,
            generations: 10,
            convergence_assist: 0.2,
            seed: 0,
            record_evaluations: false,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.islands.is_empty() {
            return Err(Error::Config("at least one island is required".into()));
        }
        for spec in &self.islands {
            spec.validate()?;
        }
        if self.population == 0 || self.generations == 0 {
            return Err(Error::Config(
                "population and generations must be positive".into(),
            ));
        }
        if self.cycles < 2 {
            return Err(Error::Config("at least 2 cycles are required".into()));
        }
        if !(0.0..1.0).contains(&self.convergence_assist) {
            return Err(Error::Config(
                "convergence assist ratio must lie in [0, 1)".into(),
            ));
        }
        if self.migration_cycles() == 0 {
            return Err(Error::Config(
                "convergence assist leaves no migration cycle".into(),
            ));
        }
        Ok(())
    }

    /// Cycles ending in a migration phase: `⌊(1 − CA) N⌋`.
    pub fn migration_cycles(&self) -> usize {
        ((1.0 - self.convergence_assist) * self.cycles as f64 + 1e-9).floor() as usize
    }

    pub fn solo_cycles(&self) -> usize {
        self.cycles - self.migration_cycles()
    }

    /// Offspring evaluations of a full run.
    pub fn offspring_budget(&self) -> usize {
        self.islands.len() * self.population * self.cycles * self.generations
    }

    /// All evaluations, initial populations included.
    pub fn evaluation_budget(&self) -> usize {
        self.offspring_budget() + self.islands.len() * self.population
    }
}

/// `q = 2(1 − c)/(1 − N) − 1` and `α = (c − 1)/(N − 1)` for 1-based cycle `c`.
pub fn migration_schedule(cycle: usize, n_cycles: usize) -> (f64, f64) {
    let (c, n) = (cycle as f64, n_cycles as f64);
    (2.0 * (1.0 - c) / (1.0 - n) - 1.0, (c - 1.0) / (n - 1.0))
}

/// Min–max normalized HV; `None` when every value is equal.
pub fn normalize_hv(hv: &[f64]) -> Option<Vec<f64>> {
    let lo = hv.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = hv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return None;
    }
    Some(hv.iter().map(|v| (v - lo) / (hi - lo)).collect())
}

/// `g_i^α / Σ_j g_j^α` with `0^0 = 1`; uniform when `g` is undefined.
pub fn destination_probabilities(g: Option<&[f64]>, alpha: f64, n_islands: usize) -> Vec<f64> {
    let Some(g) = g else {
        return vec![1.0 / n_islands as f64; n_islands];
    };
    let w: Vec<f64> = g
        .iter()
        .map(|&v| if alpha == 0.0 { 1.0 } else { v.powf(alpha) })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

/// `h_i = (1/2 − p_i) q + 1/2`, clamped to `[0, 1]`. Evaluated as
/// `(1 + q)/2 − p_i q`, which returns `p_i` bit for bit at `q = −1`.
pub fn export_probabilities(p: &[f64], q: f64) -> Vec<f64> {
    p.iter()
        .map(|pi| (0.5 * (1.0 + q) - pi * q).clamp(0.0, 1.0))
        .collect()
}

/// Multinomial draw by conditional binomials. Zero-probability categories
/// never receive anything.
pub fn sample_multinomial(k: usize, p: &[f64], rng: &mut Rng) -> Vec<usize> {
    let mut out = vec![0; p.len()];
    let Some(last) = p.iter().rposition(|&v| v > 0.0) else {
        return out;
    };
    let mut left = k as u64;
    let mut mass: f64 = p[..=last].iter().sum();
    for i in 0..last {
        if left == 0 {
            break;
        }
        let share = if mass > 0.0 {
            (p[i] / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let n = Binomial::new(left, share)
            .expect("probability in [0, 1]")
            .sample(rng);
        out[i] = n as usize;
        left -= n;
        mass -= p[i];
    }
    out[last] += left as usize;
    out
}

fn binomial(n: usize, p: f64, rng: &mut Rng) -> usize {
    Binomial::new(n as u64, p)
        .expect("probability in [0, 1]")
        .sample(rng) as usize
}

/// Indices of the `e` lowest-scoring members: score ascending, then
/// reference distance ascending, then position.
pub fn select_exports(population: &[Individual], e: usize) -> Result<Vec<usize>> {
    if e == 0 {
        return Ok(Vec::new());
    }
    if e > population.len() {
        return Err(Error::State(format!(
            "cannot export {e} of {} members",
            population.len()
        )));
    }
    let scored = annotate(population.to_vec())?.into_individuals();
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&a, &b| {
        scored[a]
            .score
            .total_cmp(&scored[b].score)
            .then(scored[a].rd.total_cmp(&scored[b].rd))
            .then(a.cmp(&b))
    });
    order.truncate(e);
    Ok(order)
}

/// Raw objectives of an island's feasible non-dominated members.
pub fn feasible_front(population: &[Individual]) -> Vec<Vec<f64>> {
    let feasible: Vec<&[f64]> = population
        .iter()
        .filter(|i| i.is_feasible())
        .map(|i| i.raw_objectives.as_slice())
        .collect();
    non_dominated_indices(&feasible)
        .into_iter()
        .map(|i| feasible[i].to_vec())
        .collect()
}

/// All-time non-dominated feasible individuals, updated incrementally.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Archive {
    members: Vec<Individual>,
    seen: usize,
    feasible_seen: usize,
}

impl Archive {
    /// Offers an individual; returns whether it entered the archive.
    pub fn insert(&mut self, ind: &Individual) -> bool {
        self.seen += 1;
        if !ind.is_feasible() {
            return false;
        }
        self.feasible_seen += 1;
        let f = &ind.raw_objectives;
        if self
            .members
            .iter()
            .any(|m| &m.raw_objectives == f || dominates_objectives(&m.raw_objectives, f))
        {
            return false;
        }
        self.members
            .retain(|m| !dominates_objectives(f, &m.raw_objectives));
        self.members.push(ind.clone());
        true
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Individual> {
        self.members
    }

    pub fn objectives(&self) -> Vec<Vec<f64>> {
        self.members
            .iter()
            .map(|m| m.raw_objectives.clone())
            .collect()
    }

    /// Individuals offered so far, and how many of them were feasible.
    pub fn seen(&self) -> (usize, usize) {
        (self.seen, self.feasible_seen)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Outcome of one debt settlement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settlement {
    /// Active island indices the vectors below refer to.
    pub islands: Vec<usize>,
    pub q: f64,
    pub alpha: f64,
    pub g: Option<Vec<f64>>,
    /// Destination probabilities.
    pub p: Vec<f64>,
    pub h: Vec<f64>,
    pub sizes: Vec<usize>,
    pub e: Vec<usize>,
}

pub struct EnsembleState {
    pub config: EnsembleConfig,
    /// Last completed cycle (1-based; 0 before the first).
    pub cycle: usize,
    pub islands: Vec<Island>,
    pub reference: Vec<f64>,
    pub archive: Archive,
    pub stats: Vec<CycleStats>,
    evaluated: Vec<Individual>,
    rng: Rng,
    hv_rng: Rng,
}

impl EnsembleState {
    pub fn new(config: EnsembleConfig, problem: &Problem, executor: &Executor) -> Result<Self> {
        config.validate()?;
        let mut islands = config
            .islands
            .iter()
            .enumerate()
            .map(|(k, spec)| {
                let seed = stream_rng(config.seed, k as u64 + 1).next_u64();
                (spec.clone(), seed)
            })
            .collect::<Vec<_>>();
        let built: Vec<Result<Island>> = executor.map_islands(&mut islands, |_, (spec, seed)| {
            Island::new(spec.clone(), problem, config.population, *seed, executor)
        });
        let islands = built.into_iter().collect::<Result<Vec<_>>>()?;
        let mut state = Self {
            rng: stream_rng(config.seed, ENSEMBLE_STREAM),
            hv_rng: stream_rng(config.seed, HV_STREAM),
            config,
            cycle: 0,
            islands,
            reference: Vec::new(),
            archive: Archive::default(),
            stats: Vec::new(),
            evaluated: Vec::new(),
        };
        let initial: Vec<Individual> = state
            .islands
            .iter()
            .flat_map(|i| i.population.clone())
            .collect();
        state.record(&initial);
        Ok(state)
    }

    fn record(&mut self, individuals: &[Individual]) {
        for ind in individuals {
            self.archive.insert(ind);
        }
        if self.config.record_evaluations {
            self.evaluated.extend_from_slice(individuals);
        }
    }

    pub fn active(&self) -> Vec<usize> {
        (0..self.islands.len())
            .filter(|&i| self.islands[i].active)
            .collect()
    }

    pub fn total_population(&self) -> usize {
        self.islands.iter().map(|i| i.population.len()).sum()
    }

    pub fn evaluations(&self) -> usize {
        self.islands.iter().map(|i| i.evaluations()).sum()
    }

    /// Evolution phase: every active island steps `generations` times.
    pub fn evolve(&mut self, problem: &Problem, executor: &Executor) -> Result<()> {
        let gens = self.config.generations;
        let results = executor.map_islands(&mut self.islands, |_, island| {
            if island.active {
                island.step_generations(problem, gens, executor)
            } else {
                Ok(Vec::new())
            }
        });
        for r in results {
            let kids = r?;
            self.record(&kids);
        }
        Ok(())
    }

    /// Recomputes the reference point and returns each island's HV
    /// (0 for inactive islands and islands without feasible members).
    pub fn population_evaluation(&mut self) -> Result<Vec<f64>> {
        let active = self.active();
        let feasible: Vec<&[f64]> = active
            .iter()
            .flat_map(|&i| self.islands[i].population.iter())
            .filter(|ind| ind.is_feasible())
            .map(|ind| ind.raw_objectives.as_slice())
            .collect();
        self.reference = match nadir_of(&feasible) {
            Some(r) => r,
            None => {
                let penalized: Vec<&[f64]> = active
                    .iter()
                    .flat_map(|&i| self.islands[i].population.iter())
                    .map(|ind| ind.objectives.as_slice())
                    .collect();
                nadir_of(&penalized).ok_or_else(|| Error::State("no members left".into()))?
            }
        };
        let mut values = vec![0.0; self.islands.len()];
        for &i in &active {
            let front = feasible_front(&self.islands[i].population);
            if !front.is_empty() {
                values[i] = hv(&FrontSet::new(&front, &self.reference)?, &mut self.hv_rng);
            }
            self.islands[i].hv_history.push(values[i]);
        }
        Ok(values)
    }

    /// Draws how many members each active island exports this cycle.
    pub fn debt_settlement(&mut self, hv: &[f64]) -> Settlement {
        let islands = self.active();
        let (q, alpha) = migration_schedule(self.cycle.max(1), self.config.cycles);
        let sizes: Vec<usize> = islands
            .iter()
            .map(|&i| self.islands[i].population.len())
            .collect();
        let active_hv: Vec<f64> = islands.iter().map(|&i| hv[i]).collect();
        let g = normalize_hv(&active_hv);
        for (k, &i) in islands.iter().enumerate() {
            self.islands[i].g = g.as_ref().map_or(0.0, |g| g[k]);
        }
        let p = destination_probabilities(g.as_deref(), alpha, islands.len());
        let h = export_probabilities(&p, q);
        let e = if islands.len() < 2 {
            vec![0; islands.len()]
        } else {
            sizes
                .iter()
                .zip(&h)
                .map(|(&n, &hi)| binomial(n, hi, &mut self.rng))
                .collect()
        };
        Settlement {
            islands,
            q,
            alpha,
            g,
            p,
            h,
            sizes,
            e,
        }
    }

    /// Removes each island's `e_i` lowest-scoring members into one pool.
    pub fn member_exportation(
        &mut self,
        islands: &[usize],
        e: &[usize],
    ) -> Result<Vec<Individual>> {
        let mut pool = Vec::new();
        for (&i, &ei) in islands.iter().zip(e) {
            let picks = select_exports(&self.islands[i].population, ei)?;
            pool.extend(self.islands[i].export(&picks));
        }
        Ok(pool)
    }

    /// Shuffles the pool and deals `ρ ~ Multinomial(K, p)` members to the
    /// islands in `islands`. Returns `ρ`.
    pub fn destination_selection(
        &mut self,
        mut pool: Vec<Individual>,
        islands: &[usize],
        p: &[f64],
    ) -> Vec<usize> {
        if pool.is_empty() {
            return vec![0; islands.len()];
        }
        pool.shuffle(&mut self.rng);
        let rho = sample_multinomial(pool.len(), p, &mut self.rng);
        let mut rest = pool.into_iter();
        for (&i, &n) in islands.iter().zip(&rho) {
            let batch: Vec<Individual> = rest.by_ref().take(n).collect();
            self.islands[i].import(batch);
        }
        rho
    }

    /// Disables emptied islands permanently.
    pub fn disable_empty(&mut self) {
        for island in &mut self.islands {
            if island.active && island.population.is_empty() {
                island.disable();
            }
        }
    }

    /// Disables island `i`, redistributing its members over the remaining
    /// active islands by the current destination probabilities.
    pub fn disable_and_rescue(&mut self, i: usize, hv: &[f64]) -> Result<()> {
        if !self.islands[i].active {
            return Ok(());
        }
        let others: Vec<usize> = self.active().into_iter().filter(|&k| k != i).collect();
        if others.is_empty() {
            return Err(Error::State(
                "the last active island cannot be disabled".into(),
            ));
        }
        let held = self.islands[i].disable();
        let others_hv: Vec<f64> = others.iter().map(|&k| hv[k]).collect();
        let (_, alpha) = migration_schedule(self.cycle.max(1), self.config.cycles);
        let p = destination_probabilities(normalize_hv(&others_hv).as_deref(), alpha, others.len());
        self.destination_selection(held, &others, &p);
        Ok(())
    }

    /// Convergence-assist winner: highest HV, then larger population, then
    /// lower index.
    pub fn best_island(&self, hv: &[f64]) -> Option<usize> {
        self.active().into_iter().reduce(|best, i| {
            let key = |k: usize| (hv[k], self.islands[k].population.len());
            let (bh, bp) = key(best);
            let (ih, ip) = key(i);
            if ih > bh || (ih == bh && ip > bp) {
                i
            } else {
                best
            }
        })
    }

    /// Runs one full cycle and appends its statistics.
    pub fn step_cycle(&mut self, problem: &Problem, executor: &Executor) -> Result<()> {
        self.cycle += 1;
        self.evolve(problem, executor)?;
        let hv_values = self.population_evaluation()?;
        let migrating = self.cycle <= self.config.migration_cycles();
        let n = self.islands.len();
        let mut exported = vec![0; n];
        let mut received = vec![0; n];
        let mut g = vec![None; n];
        let mut h = vec![None; n];
        let (q, alpha) = migration_schedule(self.cycle, self.config.cycles);
        let mut mobility: Option<MobilityMatrix> = None;
        let active_before = self.active();

        if migrating {
            let s = self.debt_settlement(&hv_values);
            let pool = self.member_exportation(&s.islands, &s.e)?;
            let rho = self.destination_selection(pool, &s.islands, &s.p);
            self.disable_empty();
            for (k, &i) in s.islands.iter().enumerate() {
                exported[i] = s.e[k];
                received[i] = rho[k];
                g[i] = Some(s.g.as_ref().map_or(0.0, |g| g[k]));
                h[i] = Some(s.h[k]);
            }
            mobility = Some(diagnostics::mobility_matrix(
                self.cycle, &s.islands, &s.p, &s.h, &s.sizes,
            ));

            if self.cycle == self.config.migration_cycles() && self.config.solo_cycles() > 0 {
                // convergence assist: merge everything into the best island
                let after = self.population_evaluation()?;
                let winner = self.best_island(&after).expect("an island is active");
                for i in self.active() {
                    if i != winner {
                        let moved = self.islands[i].population.len();
                        self.disable_and_rescue(i, &after)?;
                        exported[i] += moved;
                        received[winner] += moved;
                    }
                }
            }
        }

        let (theta, phi) = match &mobility {
            Some(m) => (diagnostics::theta(m)?, diagnostics::phi(m)),
            None => (f64::NAN, f64::NAN),
        };
        let combined_hv = if self.archive.is_empty() || self.reference.is_empty() {
            0.0
        } else {
            hv(
                &FrontSet::from_non_dominated(&self.archive.objectives(), &self.reference)?,
                &mut self.hv_rng,
            )
        };
        let islands = self
            .islands
            .iter()
            .enumerate()
            .map(|(i, island)| IslandCycleStats {
                index: i,
                id: island.spec.id.clone(),
                active: island.active,
                hv: active_before.contains(&i).then_some(hv_values[i]),
                population: island.population.len(),
                feasible: island.population.iter().filter(|m| m.is_feasible()).count(),
                g: g[i],
                h: h[i],
                exported: exported[i],
                received: received[i],
            })
            .collect();
        self.stats.push(CycleStats {
            cycle: self.cycle,
            phase: if migrating {
                Phase::Migration
            } else {
                Phase::Solo
            },
            q,
            alpha,
            reference_point: self.reference.clone(),
            islands,
            mobility,
            theta,
            phi,
            combined_hv,
            archive_size: self.archive.len(),
            evaluations: self.evaluations(),
        });
        Ok(())
    }

    pub fn finish(self) -> RunResult {
        let final_population: Vec<Individual> = self
            .islands
            .iter()
            .filter(|i| i.active)
            .flat_map(|i| i.population.iter().cloned())
            .collect();
        let (pareto_set, final_front) = final_fronts(&final_population);
        let evaluations = self.evaluations();
        let initial = self.config.islands.len() * self.config.population;
        RunResult {
            pareto_set,
            final_front,
            archive: self.archive.into_members(),
            cycles: self.stats,
            islands: self
                .islands
                .iter()
                .map(|i| IslandSummary {
                    id: i.spec.id.clone(),
                    active: i.active,
                    population: i.population.len(),
                    evaluations: i.evaluations(),
                })
                .collect(),
            evaluations,
            offspring_evaluations: evaluations - initial,
            evaluated: self.config.record_evaluations.then_some(self.evaluated),
        }
    }
}

/// Feasible non-dominated members on raw objectives, and the first front
/// on penalized objectives, both without duplicate objective vectors.
pub fn final_fronts(population: &[Individual]) -> (Vec<Individual>, Vec<Individual>) {
    let feasible: Vec<&Individual> = population.iter().filter(|i| i.is_feasible()).collect();
    let objs: Vec<&[f64]> = feasible
        .iter()
        .map(|i| i.raw_objectives.as_slice())
        .collect();
    let mut pareto_set: Vec<Individual> = Vec::new();
    for k in non_dominated_indices(&objs) {
        if !pareto_set
            .iter()
            .any(|p| p.raw_objectives == feasible[k].raw_objectives)
        {
            pareto_set.push(feasible[k].clone());
        }
    }
    let penalized: Vec<&[f64]> = population.iter().map(|i| i.objectives.as_slice()).collect();
    let mut front: Vec<Individual> = Vec::new();
    for k in non_dominated_indices(&penalized) {
        if !front
            .iter()
            .any(|p| p.objectives == population[k].objectives)
        {
            front.push(population[k].clone());
        }
    }
    (pareto_set, front)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IslandSummary {
    pub id: String,
    pub active: bool,
    pub population: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Non-dominated feasible members of the final populations.
    pub pareto_set: Vec<Individual>,
    /// First front of the final populations on penalized objectives, so
    /// infeasible members appear when nothing feasible dominates them.
    pub final_front: Vec<Individual>,
    /// All-time non-dominated feasible evaluations.
    pub archive: Vec<Individual>,
    pub cycles: Vec<CycleStats>,
    pub islands: Vec<IslandSummary>,
    /// Fitness evaluations including the initial populations.
    pub evaluations: usize,
    pub offspring_evaluations: usize,
    pub evaluated: Option<Vec<Individual>>,
}

/// Runs the ensemble to completion.
pub fn run(config: EnsembleConfig, problem: &Problem, executor: &Executor) -> Result<RunResult> {
    let mut state = EnsembleState::new(config, problem, executor)?;
    for _ in 0..state.config.cycles {
        state.step_cycle(problem, executor)?;
    }
    Ok(state.finish())
}
