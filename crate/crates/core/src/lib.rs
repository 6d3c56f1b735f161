//! Multiobjective island-ensemble optimization.
//!
//! Several multiobjective evolutionary algorithms ("islands") evolve
//! independently for a number of generations, then exchange individuals in
//! a migration phase driven by each island's hypervolume. Weak islands lose
//! members and are eventually disabled; strong ones absorb the population.
//!
//! The crate is organised bottom-up:
//!
//! * [`problem`] – problem definition, individuals, penalty constraint handling
//! * [`pareto`] – dominance, non-dominated sorting, crowding/reference distance, scoring
//! * [`indicators`] – exact and Monte-Carlo hypervolume, IGD
//! * [`variation`] and [`islands`] – operators and the constituent algorithms
//! * [`ensemble`] – the migration engine
//! * [`diagnostics`] – mobility matrix and migration-speed indicators
//! * [`benchmarks`] – ZDT/DTLZ suites and the SMR equilibrium-cycle problem
//! * [`harness`] – configs, campaigns, Wilcoxon tests, CSV/JSON output
//!
//! With the default `parallel` feature, island evolution and fitness
//! evaluation run on rayon thread pools; without it everything runs on the
//! calling thread. Results are identical either way.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod diagnostics;
pub mod ensemble;
pub mod error;
pub mod harness;
pub mod indicators;
pub mod islands;
pub mod parallel;
pub mod pareto;
pub mod problem;
pub mod variation;

pub use error::{Error, Result};

/// Random stream used throughout; seeded explicitly everywhere.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the crate's random stream from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}
