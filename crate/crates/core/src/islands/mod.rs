//! Islands: constituent multiobjective optimizers of the ensemble.
//!
//! An island owns its population, its random stream and whatever state its
//! algorithm keeps (reference directions, weight vectors). Any type
//! implementing [`IslandAlgorithm`] can be plugged in.

mod moead;
mod nsga2;
mod nsga3;
mod random;
mod spea2;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::Executor;
use crate::pareto::{crowding_distances, sort_fronts};
use crate::problem::{DecisionVector, Individual, Problem};
use crate::variation::{Crossover, VariationConfig};
use crate::Rng;

pub use moead::MoeadLite;
pub use nsga2::Nsga2;
pub use nsga3::Nsga3;
pub use random::RandomSearch;
pub use spea2::Spea2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    Nsga2,
    Nsga3,
    Spea2,
    MoeadLite,
    /// Elitist uniform random sampling; a baseline, not an ensemble member.
    RandomSearch,
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nsga2" | "nsga-ii" => Ok(Self::Nsga2),
            "nsga3" | "nsga-iii" => Ok(Self::Nsga3),
            "spea2" => Ok(Self::Spea2),
            "moead" | "moead-lite" | "moea/d" => Ok(Self::MoeadLite),
            "random" | "random-search" => Ok(Self::RandomSearch),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Nsga2 => "nsga2",
            Self::Nsga3 => "nsga3",
            Self::Spea2 => "spea2",
            Self::MoeadLite => "moead-lite",
            Self::RandomSearch => "random-search",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IslandAlgorithmSpec {
    pub id: String,
    pub kind: AlgorithmKind,
    pub variation: VariationConfig,
    /// Das–Dennis partitions for direction-based kinds; `None` picks the
    /// largest lattice not exceeding the population size.
    pub partitions: Option<usize>,
    /// MOEA/D neighborhood size.
    pub neighborhood: usize,
}

impl IslandAlgorithmSpec {
    pub fn new(id: impl Into<String>, kind: AlgorithmKind) -> Self {
        Self {
            id: id.into(),
            kind,
            variation: VariationConfig::sbx_default(),
            partitions: None,
            neighborhood: 20,
        }
    }

    pub fn with_variation(mut self, variation: VariationConfig) -> Self {
        self.variation = variation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let v = &self.variation;
        let prob_ok = |p: f64| (0.0..=1.0).contains(&p);
        if !prob_ok(v.crossover_prob) || !v.mutation_prob.is_none_or(prob_ok) {
            return Err(Error::Config(format!(
                "{}: probabilities must lie in [0, 1]",
                self.id
            )));
        }
        let crossover_ok = match v.crossover {
            Crossover::Sbx { eta } => eta > 0.0,
            Crossover::Blend { alpha } => alpha >= 0.0 && alpha.is_finite(),
        };
        if !crossover_ok || !(v.mutation_eta > 0.0) {
            return Err(Error::Config(format!(
                "{}: distribution indices must be positive",
                self.id
            )));
        }
        if self.partitions == Some(0) {
            return Err(Error::Config(format!(
                "{}: partitions must be at least 1",
                self.id
            )));
        }
        if self.neighborhood < 2 {
            return Err(Error::Config(format!(
                "{}: neighborhood must be at least 2",
                self.id
            )));
        }
        Ok(())
    }

    pub fn build(&self) -> Box<dyn IslandAlgorithm> {
        match self.kind {
            AlgorithmKind::Nsga2 => Box::new(Nsga2::new(self.variation)),
            AlgorithmKind::Nsga3 => Box::new(Nsga3::new(self.variation, self.partitions)),
            AlgorithmKind::Spea2 => Box::new(Spea2::new(self.variation)),
            AlgorithmKind::MoeadLite => Box::new(MoeadLite::new(self.variation, self.neighborhood)),
            AlgorithmKind::RandomSearch => Box::new(RandomSearch),
        }
    }
}

/// The ensemble of the reference configuration: NSGA-III with blend
/// crossover, then NSGA-II, MOEA/D-lite and SPEA2 with SBX.
pub fn default_ensemble() -> Vec<IslandAlgorithmSpec> {
    vec![
        IslandAlgorithmSpec::new("island1-nsga3", AlgorithmKind::Nsga3)
            .with_variation(VariationConfig::blend_default()),
        IslandAlgorithmSpec::new("island2-nsga2", AlgorithmKind::Nsga2),
        IslandAlgorithmSpec::new("island3-moead", AlgorithmKind::MoeadLite),
        IslandAlgorithmSpec::new("island4-spea2", AlgorithmKind::Spea2),
    ]
}

/// Evaluation plumbing handed to algorithms.
pub struct StepContext<'a> {
    pub problem: &'a Problem,
    pub executor: &'a Executor,
}

impl StepContext<'_> {
    pub fn evaluate(&self, decisions: &[DecisionVector]) -> Result<Vec<Individual>> {
        self.executor.evaluate_all(self.problem, decisions)
    }
}

/// A pluggable island optimizer. The population lives in the [`Island`];
/// the algorithm keeps only auxiliary state.
pub trait IslandAlgorithm: Send {
    /// Called once with the evaluated initial population.
    fn initialize(
        &mut self,
        population: &mut Vec<Individual>,
        problem: &Problem,
        rng: &mut Rng,
    ) -> Result<()>;

    /// Advances one generation at fixed population size and returns the
    /// offspring evaluated on the way.
    fn step_one_generation(
        &mut self,
        population: &mut Vec<Individual>,
        ctx: &StepContext<'_>,
        rng: &mut Rng,
    ) -> Result<Vec<Individual>>;

    /// Removes and returns the members at `indices`.
    fn export_members(
        &mut self,
        population: &mut Vec<Individual>,
        indices: &[usize],
    ) -> Vec<Individual> {
        remove_indices(population, indices)
    }

    fn import_members(&mut self, population: &mut Vec<Individual>, incoming: Vec<Individual>) {
        population.extend(incoming);
    }
}

/// Removes `indices` (any order, no duplicates) and returns them in the
/// given order.
pub(crate) fn remove_indices<T>(items: &mut Vec<T>, indices: &[usize]) -> Vec<T> {
    let mut slots: Vec<Option<T>> = items.drain(..).map(Some).collect();
    let out = indices
        .iter()
        .map(|&i| slots[i].take().expect("index exported twice"))
        .collect();
    items.extend(slots.into_iter().flatten());
    out
}

pub struct Island {
    pub spec: IslandAlgorithmSpec,
    pub population: Vec<Individual>,
    pub active: bool,
    /// HV reported at each migration phase while active.
    pub hv_history: Vec<f64>,
    /// Min–max normalized HV of the latest migration phase.
    pub g: f64,
    algorithm: Box<dyn IslandAlgorithm>,
    rng: Rng,
    evaluations: usize,
}

impl fmt::Debug for Island {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Island")
            .field("id", &self.spec.id)
            .field("active", &self.active)
            .field("population", &self.population.len())
            .field("g", &self.g)
            .finish()
    }
}

impl Island {
    /// Creates an island with a random, evaluated population.
    pub fn new(
        spec: IslandAlgorithmSpec,
        problem: &Problem,
        size: usize,
        seed: u64,
        executor: &Executor,
    ) -> Result<Self> {
        spec.validate()?;
        let algorithm = spec.build();
        Self::with_algorithm(spec, algorithm, problem, size, seed, executor)
    }

    pub fn with_algorithm(
        spec: IslandAlgorithmSpec,
        mut algorithm: Box<dyn IslandAlgorithm>,
        problem: &Problem,
        size: usize,
        seed: u64,
        executor: &Executor,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::Config(format!(
                "{}: population size must be positive",
                spec.id
            )));
        }
        let mut rng = Rng::seed_from_u64(seed);
        let decisions: Vec<_> = (0..size)
            .map(|_| problem.random_decision(&mut rng))
            .collect();
        let mut population = executor.evaluate_all(problem, &decisions)?;
        algorithm.initialize(&mut population, problem, &mut rng)?;
        Ok(Self {
            spec,
            population,
            active: true,
            hv_history: Vec::new(),
            g: 0.0,
            algorithm,
            rng,
            evaluations: size,
        })
    }

    /// Fitness evaluations spent so far, initialization included.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Runs `n_gens` generations and returns every offspring evaluated.
    pub fn step_generations(
        &mut self,
        problem: &Problem,
        n_gens: usize,
        executor: &Executor,
    ) -> Result<Vec<Individual>> {
        if !self.active {
            return Err(Error::State(format!("island {} is disabled", self.spec.id)));
        }
        if self.population.is_empty() {
            return Err(Error::State(format!(
                "island {} has no members",
                self.spec.id
            )));
        }
        let ctx = StepContext { problem, executor };
        let mut offspring = Vec::new();
        for _ in 0..n_gens {
            let size = self.population.len();
            let kids =
                self.algorithm
                    .step_one_generation(&mut self.population, &ctx, &mut self.rng)?;
            debug_assert_eq!(self.population.len(), size);
            self.evaluations += kids.len();
            offspring.extend(kids);
        }
        Ok(offspring)
    }

    pub fn export(&mut self, indices: &[usize]) -> Vec<Individual> {
        self.algorithm.export_members(&mut self.population, indices)
    }

    pub fn import(&mut self, incoming: Vec<Individual>) {
        if !incoming.is_empty() {
            self.algorithm
                .import_members(&mut self.population, incoming);
        }
    }

    /// Marks the island inactive and hands back whatever it still holds.
    pub fn disable(&mut self) -> Vec<Individual> {
        self.active = false;
        let all: Vec<usize> = (0..self.population.len()).collect();
        self.export(&all)
    }
}

/// `C(h + m - 1, m - 1)`, saturating.
pub fn lattice_size(partitions: usize, n_objectives: usize) -> usize {
    let k = n_objectives.saturating_sub(1) as u128;
    let n = (partitions + n_objectives).saturating_sub(1) as u128;
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
        if c > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    c as usize
}

/// Das–Dennis simplex lattice: all weight vectors with components in
/// `{0, 1/h, ..., 1}` summing to one.
pub fn das_dennis_directions(n_objectives: usize, partitions: usize) -> Vec<Vec<f64>> {
    fn rec(out: &mut Vec<Vec<f64>>, cur: &mut Vec<usize>, left: usize, m: usize, h: usize) {
        if cur.len() == m - 1 {
            cur.push(left);
            out.push(cur.iter().map(|&k| k as f64 / h as f64).collect());
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(k);
            rec(out, cur, left - k, m, h);
            cur.pop();
        }
    }
    let h = partitions.max(1);
    let mut out = Vec::with_capacity(lattice_size(h, n_objectives));
    rec(&mut out, &mut Vec::new(), h, n_objectives, h);
    out
}

/// Largest partition count whose lattice fits in `budget` (at least 1).
pub fn auto_partitions(n_objectives: usize, budget: usize) -> usize {
    let mut h = 1;
    while lattice_size(h + 1, n_objectives) <= budget {
        h += 1;
    }
    h
}

/// Front ranks (1-based) and per-front crowding distances.
pub(crate) fn rank_and_crowding(pop: &[Individual]) -> (Vec<usize>, Vec<f64>) {
    let objs: Vec<&[f64]> = pop.iter().map(|i| i.objectives.as_slice()).collect();
    let mut rank = vec![0; pop.len()];
    let mut cd = vec![0.0; pop.len()];
    for (r, front) in sort_fronts(&objs).iter().enumerate() {
        let pts: Vec<&[f64]> = front.iter().map(|&i| objs[i]).collect();
        for (&i, d) in front.iter().zip(crowding_distances(&pts)) {
            rank[i] = r + 1;
            cd[i] = d;
        }
    }
    (rank, cd)
}

/// Binary tournaments: lower rank wins, then larger crowding, then a coin.
pub(crate) fn binary_tournament(rank: &[usize], cd: &[f64], n: usize, rng: &mut Rng) -> Vec<usize> {
    let len = rank.len();
    (0..n)
        .map(|_| {
            let a = rng.random_range(0..len);
            let b = rng.random_range(0..len);
            if rank[a] != rank[b] {
                if rank[a] < rank[b] {
                    a
                } else {
                    b
                }
            } else if cd[a] != cd[b] {
                if cd[a] > cd[b] {
                    a
                } else {
                    b
                }
            } else if rng.random_bool(0.5) {
                a
            } else {
                b
            }
        })
        .collect()
}

/// μ+λ truncation by front, the split front by descending crowding.
pub(crate) fn crowding_truncation(pool: Vec<Individual>, mu: usize) -> Vec<Individual> {
    let objs: Vec<&[f64]> = pool.iter().map(|i| i.objectives.as_slice()).collect();
    let mut keep = Vec::with_capacity(mu);
    for front in sort_fronts(&objs) {
        if keep.len() + front.len() <= mu {
            keep.extend(front);
            if keep.len() == mu {
                break;
            }
            continue;
        }
        let pts: Vec<&[f64]> = front.iter().map(|&i| objs[i]).collect();
        let cd = crowding_distances(&pts);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| cd[b].total_cmp(&cd[a]));
        keep.extend(order.into_iter().take(mu - keep.len()).map(|k| front[k]));
        break;
    }
    keep.sort_unstable();
    select(pool, &keep)
}

/// Picks `indices` (ascending, unique) out of `pool`, preserving order.
pub(crate) fn select(pool: Vec<Individual>, indices: &[usize]) -> Vec<Individual> {
    let mut want = indices.iter().peekable();
    pool.into_iter()
        .enumerate()
        .filter_map(|(i, ind)| {
            if want.peek() == Some(&&i) {
                want.next();
                Some(ind)
            } else {
                None
            }
        })
        .collect()
}

/// Mating selection plus variation: `n` children from tournament winners.
pub(crate) fn make_offspring(
    population: &[Individual],
    rank: &[usize],
    cd: &[f64],
    n: usize,
    config: &VariationConfig,
    problem: &Problem,
    rng: &mut Rng,
) -> Vec<DecisionVector> {
    let parents: Vec<&DecisionVector> = binary_tournament(rank, cd, n, rng)
        .into_iter()
        .map(|i| &population[i].decision)
        .collect();
    crate::variation::variation(&parents, config, problem, rng)
}

/// Uniformly random point on the unit simplex.
pub(crate) fn random_simplex_point(m: usize, rng: &mut Rng) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..m - 1).map(|_| rng.random::<f64>()).collect();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| w[1] - w[0]).collect()
}

pub(crate) fn shuffle<T>(items: &mut [T], rng: &mut Rng) {
    items.shuffle(rng);
}
