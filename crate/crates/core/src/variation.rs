//! Variation operators: simulated binary crossover, blend crossover and
//! polynomial mutation. Offspring are always clipped to bounds, and discrete
//! genes snapped back to their levels, after variation.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::problem::{DecisionVector, Problem};
use crate::Rng;

const EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Crossover {
    /// Simulated binary crossover with distribution index `eta`.
    Sbx { eta: f64 },
    /// BLX-alpha blend crossover.
    Blend { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationConfig {
    pub crossover: Crossover,
    pub crossover_prob: f64,
    pub mutation_eta: f64,
    /// Per-gene mutation probability; `None` means `1 / n_vars`.
    pub mutation_prob: Option<f64>,
}

impl VariationConfig {
    /// SBX(20) with p_c = 0.9 and polynomial mutation(20) with p_m = 1/n.
    pub fn sbx_default() -> Self {
        Self {
            crossover: Crossover::Sbx { eta: 20.0 },
            crossover_prob: 0.9,
            mutation_eta: 20.0,
            mutation_prob: None,
        }
    }

    /// Blend crossover (alpha 0.5) with p_c = 0.65 and p_m = 0.35.
    pub fn blend_default() -> Self {
        Self {
            crossover: Crossover::Blend { alpha: 0.5 },
            crossover_prob: 0.65,
            mutation_eta: 20.0,
            mutation_prob: Some(0.35),
        }
    }

    pub fn mutation_prob_for(&self, n_vars: usize) -> f64 {
        self.mutation_prob.unwrap_or(1.0 / n_vars.max(1) as f64)
    }
}

/// Bounded SBX on one pair. Each gene crosses with probability 1/2.
pub fn sbx(
    p1: &[f64],
    p2: &[f64],
    eta: f64,
    problem: &Problem,
    rng: &mut Rng,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for (k, var) in problem.variables().iter().enumerate() {
        if rng.random::<f64>() > 0.5 {
            continue;
        }
        let (x1, x2) = (p1[k].min(p2[k]), p1[k].max(p2[k]));
        if x2 - x1 <= EPS {
            continue;
        }
        let (lo, hi) = (var.lower, var.upper);
        let u = rng.random::<f64>();

        let beta = 1.0 + 2.0 * (x1 - lo) / (x2 - x1);
        let alpha = 2.0 - beta.powf(-(eta + 1.0));
        let betaq = spread_factor(u, alpha, eta);
        let y1 = 0.5 * ((x1 + x2) - betaq * (x2 - x1));

        let beta = 1.0 + 2.0 * (hi - x2) / (x2 - x1);
        let alpha = 2.0 - beta.powf(-(eta + 1.0));
        let betaq = spread_factor(u, alpha, eta);
        let y2 = 0.5 * ((x1 + x2) + betaq * (x2 - x1));

        let (y1, y2) = (y1.clamp(lo, hi), y2.clamp(lo, hi));
        if rng.random::<f64>() <= 0.5 {
            c1[k] = y2;
            c2[k] = y1;
        } else {
            c1[k] = y1;
            c2[k] = y2;
        }
    }
    (c1, c2)
}

fn spread_factor(u: f64, alpha: f64, eta: f64) -> f64 {
    if u <= 1.0 / alpha {
        (u * alpha).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
    }
}

/// BLX-alpha: each child gene uniform in the parents' interval widened by
/// `alpha` times its length on both sides.
pub fn blend(p1: &[f64], p2: &[f64], alpha: f64, rng: &mut Rng) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = Vec::with_capacity(p1.len());
    let mut c2 = Vec::with_capacity(p1.len());
    for (&a, &b) in p1.iter().zip(p2) {
        let (lo, hi) = (a.min(b), a.max(b));
        let spread = alpha * (hi - lo);
        let (lo, hi) = (lo - spread, hi + spread);
        if hi - lo <= EPS {
            c1.push(a);
            c2.push(b);
        } else {
            c1.push(rng.random_range(lo..=hi));
            c2.push(rng.random_range(lo..=hi));
        }
    }
    (c1, c2)
}

/// Bounded polynomial mutation applied gene-wise with probability `prob`.
pub fn polynomial_mutation(
    genes: &mut [f64],
    eta: f64,
    prob: f64,
    problem: &Problem,
    rng: &mut Rng,
) {
    for (x, var) in genes.iter_mut().zip(problem.variables()) {
        if rng.random::<f64>() >= prob {
            continue;
        }
        let (lo, hi) = (var.lower, var.upper);
        if hi - lo <= 0.0 {
            continue;
        }
        let delta1 = (*x - lo) / (hi - lo);
        let delta2 = (hi - *x) / (hi - lo);
        let u = rng.random::<f64>();
        let power = 1.0 / (eta + 1.0);
        let deltaq = if u < 0.5 {
            let xy = 1.0 - delta1;
            let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
            val.powf(power) - 1.0
        } else {
            let xy = 1.0 - delta2;
            let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
            1.0 - val.powf(power)
        };
        *x = (*x + deltaq * (hi - lo)).clamp(lo, hi);
    }
}

/// Crossover (with probability `crossover_prob`) then mutation on one pair.
pub fn vary_pair(
    p1: &[f64],
    p2: &[f64],
    config: &VariationConfig,
    problem: &Problem,
    rng: &mut Rng,
) -> (Vec<f64>, Vec<f64>) {
    let (mut c1, mut c2) = if rng.random::<f64>() < config.crossover_prob {
        match config.crossover {
            Crossover::Sbx { eta } => sbx(p1, p2, eta, problem, rng),
            Crossover::Blend { alpha } => blend(p1, p2, alpha, rng),
        }
    } else {
        (p1.to_vec(), p2.to_vec())
    };
    let pm = config.mutation_prob_for(problem.n_variables());
    polynomial_mutation(&mut c1, config.mutation_eta, pm, problem, rng);
    polynomial_mutation(&mut c2, config.mutation_eta, pm, problem, rng);
    problem.repair(&mut c1);
    problem.repair(&mut c2);
    (c1, c2)
}

/// Produces one child per parent by pairing consecutive parents. With an
/// odd count the last parent pairs with the first.
pub fn variation(
    parents: &[&DecisionVector],
    config: &VariationConfig,
    problem: &Problem,
    rng: &mut Rng,
) -> Vec<DecisionVector> {
    let n = parents.len();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while out.len() < n {
        let a = parents[i % n].genes();
        let b = parents[(i + 1) % n].genes();
        let (c1, c2) = vary_pair(a, b, config, problem, rng);
        out.push(DecisionVector::new(c1));
        if out.len() < n {
            out.push(DecisionVector::new(c2));
        }
        i += 2;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{RawEvaluation, VariableSpec};
    use crate::seeded_rng;

    fn unit_problem(n: usize) -> Problem {
        let vars = (0..n)
            .map(|i| VariableSpec::continuous(format!("x{i}"), 0.0, 1.0).unwrap())
            .collect();
        Problem::new("unit", vars, 2, vec![], |g: &[f64]| {
            Ok(RawEvaluation::unconstrained(vec![g[0], 1.0 - g[0]]))
        })
        .unwrap()
    }

    #[test]
    fn zero_probabilities_copy_parents() {
        let p = unit_problem(4);
        let cfg = VariationConfig {
            crossover: Crossover::Sbx { eta: 20.0 },
            crossover_prob: 0.0,
            mutation_eta: 20.0,
            mutation_prob: Some(0.0),
        };
        let a = DecisionVector::new(vec![0.1, 0.2, 0.3, 0.4]);
        let b = DecisionVector::new(vec![0.9, 0.8, 0.7, 0.6]);
        let kids = variation(&[&a, &b], &cfg, &p, &mut seeded_rng(5));
        assert_eq!(kids, vec![a, b]);
    }

    #[test]
    fn sbx_fixed_point() {
        let p = unit_problem(3);
        let x = [0.2, 0.5, 0.9];
        let mut rng = seeded_rng(9);
        for _ in 0..100 {
            let (c1, c2) = sbx(&x, &x, 20.0, &p, &mut rng);
            assert_eq!(c1, x);
            assert_eq!(c2, x);
        }
    }

    #[test]
    fn polynomial_mutation_is_symmetric_at_midpoint() {
        let p = unit_problem(1);
        let mut rng = seeded_rng(21);
        let trials = 100_000;
        let mut sum = 0.0;
        for _ in 0..trials {
            let mut g = [0.5];
            polynomial_mutation(&mut g, 20.0, 1.0, &p, &mut rng);
            sum += g[0];
        }
        assert!((sum / trials as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn offspring_respect_bounds_and_levels() {
        let vars = vec![
            VariableSpec::continuous("x", -1.0, 1.0).unwrap(),
            VariableSpec::discrete("e", vec![1.0, 1.5, 2.0, 2.5]).unwrap(),
        ];
        let p = Problem::new("mixed", vars, 2, vec![], |g: &[f64]| {
            Ok(RawEvaluation::unconstrained(vec![g[0], g[1]]))
        })
        .unwrap();
        let mut rng = seeded_rng(2);
        let a = DecisionVector::new(vec![-1.0, 1.0]);
        let b = DecisionVector::new(vec![1.0, 2.5]);
        for cfg in [
            VariationConfig::sbx_default(),
            VariationConfig::blend_default(),
        ] {
            for _ in 0..500 {
                for kid in variation(&[&a, &b, &a], &cfg, &p, &mut rng) {
                    p.check_decision(kid.genes()).unwrap();
                }
            }
        }
    }

    #[test]
    fn variation_child_count_matches_parents() {
        let p = unit_problem(2);
        let a = DecisionVector::new(vec![0.1, 0.2]);
        let kids = variation(
            &[&a, &a, &a],
            &VariationConfig::sbx_default(),
            &p,
            &mut seeded_rng(1),
        );
        assert_eq!(kids.len(), 3);
    }
}
