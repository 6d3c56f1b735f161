//! Two-level worker pools: islands run concurrently on one pool, and each
//! concurrently running island fans its fitness evaluations out to its own
//! evaluation pool.
//!
//! Every parallel map collects results in input order and no reduction is
//! done in parallel, so results never depend on the worker counts. Without
//! the `parallel` feature every map runs on the calling thread.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{DecisionVector, Individual, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Workers {
    /// Islands evolving at the same time.
    pub islands: usize,
    /// Evaluation workers per running island.
    pub evaluators: usize,
}

impl Default for Workers {
    fn default() -> Self {
        Self {
            islands: 1,
            evaluators: 1,
        }
    }
}

impl Workers {
    pub fn new(islands: usize, evaluators: usize) -> Result<Self> {
        if islands == 0 || evaluators == 0 {
            return Err(Error::Config("worker counts must be at least 1".into()));
        }
        Ok(Self {
            islands,
            evaluators,
        })
    }
}

#[cfg(feature = "parallel")]
struct Pools {
    islands: Option<rayon::ThreadPool>,
    /// One evaluation pool per island-pool thread (or a single one when
    /// islands run sequentially).
    evals: Vec<rayon::ThreadPool>,
}

pub struct Executor {
    workers: Workers,
    #[cfg(feature = "parallel")]
    pools: Option<Pools>,
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor")
            .field("workers", &self.workers)
            .finish()
    }
}

impl Default for Executor {
    fn default() -> Self {
        Self::sequential()
    }
}

impl Executor {
    /// Runs everything on the calling thread.
    pub fn sequential() -> Self {
        Self {
            workers: Workers::default(),
            #[cfg(feature = "parallel")]
            pools: None,
        }
    }

    #[cfg(feature = "parallel")]
    pub fn new(workers: Workers) -> Result<Self> {
        if workers.islands <= 1 && workers.evaluators <= 1 {
            return Ok(Self {
                workers,
                pools: None,
            });
        }
        let build = |n: usize, name: &'static str| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .thread_name(move |i| format!("maeo-{name}-{i}"))
                .build()
                .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))
        };
        let islands = if workers.islands > 1 {
            Some(build(workers.islands, "island")?)
        } else {
            None
        };
        let evals = if workers.evaluators > 1 {
            (0..workers.islands)
                .map(|_| build(workers.evaluators, "eval"))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(Self {
            workers,
            pools: Some(Pools { islands, evals }),
        })
    }

    #[cfg(not(feature = "parallel"))]
    pub fn new(workers: Workers) -> Result<Self> {
        Ok(Self { workers })
    }

    pub fn workers(&self) -> Workers {
        self.workers
    }

    /// Evaluates decisions, preserving order. The first failure is returned.
    pub fn evaluate_all(
        &self,
        problem: &Problem,
        decisions: &[DecisionVector],
    ) -> Result<Vec<Individual>> {
        #[cfg(feature = "parallel")]
        if let Some(pool) = self.eval_pool() {
            use rayon::prelude::*;
            return pool.install(|| decisions.par_iter().map(|d| problem.evaluate(d)).collect());
        }
        decisions.iter().map(|d| problem.evaluate(d)).collect()
    }

    #[cfg(feature = "parallel")]
    fn eval_pool(&self) -> Option<&rayon::ThreadPool> {
        let pools = self.pools.as_ref()?;
        if pools.evals.is_empty() {
            return None;
        }
        let slot = rayon::current_thread_index().unwrap_or(0) % pools.evals.len();
        Some(&pools.evals[slot])
    }

    /// Applies `f` to every item on the island pool, results in item order.
    pub fn map_islands<T, R, F>(&self, items: &mut [T], f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(usize, &mut T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = self.pools.as_ref().and_then(|p| p.islands.as_ref()) {
            use rayon::prelude::*;
            return pool.install(|| {
                items
                    .par_iter_mut()
                    .enumerate()
                    .map(|(i, t)| f(i, t))
                    .collect()
            });
        }
        items.iter_mut().enumerate().map(|(i, t)| f(i, t)).collect()
    }
}
