//! Problem definition, individuals and penalty-based constraint handling.
//!
//! Every objective is minimized. Constraint violations are folded into the
//! objectives as an additive penalty of [`PENALTY`] times the sum of
//! limit-normalized violations, applied to every objective.

use std::fmt;
use std::sync::Arc;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::Rng;

/// Penalty magnitude applied per unit of normalized constraint violation.
pub const PENALTY: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum VariableKind {
    Continuous,
    /// Ordered, strictly increasing admissible values.
    Discrete {
        levels: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub kind: VariableKind,
    pub lower: f64,
    pub upper: f64,
}

impl VariableSpec {
    pub fn continuous(name: impl Into<String>, lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower > upper {
            return Err(domain(format!("invalid bounds [{lower}, {upper}]")));
        }
        Ok(Self {
            name: name.into(),
            kind: VariableKind::Continuous,
            lower,
            upper,
        })
    }

    pub fn discrete(name: impl Into<String>, levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(domain("discrete variable needs at least one level"));
        }
        if levels.iter().any(|l| !l.is_finite()) || levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(domain(
                "discrete levels must be finite and strictly increasing",
            ));
        }
        Ok(Self {
            name: name.into(),
            lower: levels[0],
            upper: levels[levels.len() - 1],
            kind: VariableKind::Discrete { levels },
        })
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.kind, VariableKind::Discrete { .. })
    }

    pub fn contains(&self, x: f64) -> bool {
        match &self.kind {
            VariableKind::Continuous => x >= self.lower && x <= self.upper,
            VariableKind::Discrete { levels } => levels.contains(&x),
        }
    }

    /// Clips into bounds and, for discrete variables, snaps to the nearest
    /// level. Exact ties go to the lower level.
    pub fn repair(&self, x: f64) -> f64 {
        let x = if x.is_nan() {
            self.lower
        } else {
            x.clamp(self.lower, self.upper)
        };
        match &self.kind {
            VariableKind::Continuous => x,
            VariableKind::Discrete { levels } => {
                let upper = levels.partition_point(|&l| l < x);
                if upper == 0 {
                    levels[0]
                } else if upper == levels.len() {
                    levels[levels.len() - 1]
                } else {
                    let (lo, hi) = (levels[upper - 1], levels[upper]);
                    if hi - x < x - lo {
                        hi
                    } else {
                        lo
                    }
                }
            }
        }
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        match &self.kind {
            VariableKind::Continuous => {
                if self.lower == self.upper {
                    self.lower
                } else {
                    rng.random_range(self.lower..=self.upper)
                }
            }
            VariableKind::Discrete { levels } => levels[rng.random_range(0..levels.len())],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintDirection {
    /// value ≤ limit
    AtMost,
    /// value ≥ limit
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSpec {
    pub name: String,
    pub limit: f64,
    pub direction: ConstraintDirection,
}

impl ConstraintSpec {
    pub fn at_most(name: impl Into<String>, limit: f64) -> Self {
        Self {
            name: name.into(),
            limit,
            direction: ConstraintDirection::AtMost,
        }
    }

    pub fn at_least(name: impl Into<String>, limit: f64) -> Self {
        Self {
            name: name.into(),
            limit,
            direction: ConstraintDirection::AtLeast,
        }
    }

    pub fn violation(&self, value: f64) -> f64 {
        match self.direction {
            ConstraintDirection::AtMost => (value - self.limit).max(0.0),
            ConstraintDirection::AtLeast => (self.limit - value).max(0.0),
        }
    }

    /// Scale used to normalize violations; a zero limit normalizes by one.
    fn scale(&self) -> f64 {
        if self.limit == 0.0 {
            1.0
        } else {
            self.limit.abs()
        }
    }
}

/// Output of a problem's evaluator, before penalties.
#[derive(Debug, Clone, PartialEq)]
pub struct RawEvaluation {
    pub objectives: Vec<f64>,
    pub constraints: Vec<f64>,
}

impl RawEvaluation {
    pub fn unconstrained(objectives: Vec<f64>) -> Self {
        Self {
            objectives,
            constraints: Vec::new(),
        }
    }
}

/// A deterministic map from genes to objectives and constraint values.
pub trait Evaluator: Send + Sync {
    fn evaluate(&self, genes: &[f64]) -> std::result::Result<RawEvaluation, String>;
}

impl<F> Evaluator for F
where
    F: Fn(&[f64]) -> std::result::Result<RawEvaluation, String> + Send + Sync,
{
    fn evaluate(&self, genes: &[f64]) -> std::result::Result<RawEvaluation, String> {
        self(genes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionVector(Vec<f64>);

impl DecisionVector {
    pub fn new(genes: Vec<f64>) -> Self {
        Self(genes)
    }

    pub fn genes(&self) -> &[f64] {
        &self.0
    }

    pub fn genes_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_genes(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for DecisionVector {
    fn from(genes: Vec<f64>) -> Self {
        Self(genes)
    }
}

/// An evaluated candidate plus its Pareto annotations.
///
/// `rank` is 0 until the individual has been sorted; ranks start at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub decision: DecisionVector,
    /// Penalized objectives, used for all selection decisions.
    pub objectives: Vec<f64>,
    pub raw_objectives: Vec<f64>,
    pub constraints: Vec<f64>,
    pub violations: Vec<f64>,
    pub rank: usize,
    pub cd: f64,
    pub rd: f64,
    pub score: f64,
}

impl Individual {
    pub fn is_feasible(&self) -> bool {
        self.violations.iter().all(|&v| v == 0.0)
    }

    pub fn n_objectives(&self) -> usize {
        self.objectives.len()
    }

    pub(crate) fn clear_annotations(&mut self) {
        self.rank = 0;
        self.cd = 0.0;
        self.rd = 0.0;
        self.score = 0.0;
    }
}

/// A multiobjective minimization problem.
#[derive(Clone)]
pub struct Problem {
    name: String,
    variables: Vec<VariableSpec>,
    n_objectives: usize,
    constraints: Vec<ConstraintSpec>,
    evaluator: Arc<dyn Evaluator>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("n_variables", &self.variables.len())
            .field("n_objectives", &self.n_objectives)
            .field("constraints", &self.constraints)
            .finish()
    }
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        variables: Vec<VariableSpec>,
        n_objectives: usize,
        constraints: Vec<ConstraintSpec>,
        evaluator: impl Evaluator + 'static,
    ) -> Result<Self> {
        if n_objectives < 2 {
            return Err(domain(
                "a multiobjective problem needs at least two objectives",
            ));
        }
        if variables.is_empty() {
            return Err(domain("problem has no decision variables"));
        }
        Ok(Self {
            name: name.into(),
            variables,
            n_objectives,
            constraints,
            evaluator: Arc::new(evaluator),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn n_objectives(&self) -> usize {
        self.n_objectives
    }

    pub fn constraints(&self) -> &[ConstraintSpec] {
        &self.constraints
    }

    pub fn check_decision(&self, genes: &[f64]) -> Result<()> {
        if genes.len() != self.variables.len() {
            return Err(domain(format!(
                "decision has {} genes, problem has {} variables",
                genes.len(),
                self.variables.len()
            )));
        }
        for (x, var) in genes.iter().zip(&self.variables) {
            if !var.contains(*x) {
                return Err(domain(format!("gene {x} outside variable '{}'", var.name)));
            }
        }
        Ok(())
    }

    /// Clips every gene into bounds and snaps discrete genes to levels.
    pub fn repair(&self, genes: &mut [f64]) {
        for (x, var) in genes.iter_mut().zip(&self.variables) {
            *x = var.repair(*x);
        }
    }

    pub fn random_decision(&self, rng: &mut Rng) -> DecisionVector {
        DecisionVector(self.variables.iter().map(|v| v.sample(rng)).collect())
    }

    /// Evaluates a decision vector and applies the constraint penalty.
    pub fn evaluate(&self, decision: &DecisionVector) -> Result<Individual> {
        self.check_decision(decision.genes())?;
        let fail = |message: String| Error::Evaluation {
            decision: decision.genes().to_vec(),
            message,
        };
        let raw = self.evaluator.evaluate(decision.genes()).map_err(fail)?;
        if raw.objectives.len() != self.n_objectives {
            return Err(fail(format!(
                "evaluator returned {} objectives, expected {}",
                raw.objectives.len(),
                self.n_objectives
            )));
        }
        if raw.constraints.len() != self.constraints.len() {
            return Err(fail(format!(
                "evaluator returned {} constraint values, expected {}",
                raw.constraints.len(),
                self.constraints.len()
            )));
        }
        if raw
            .objectives
            .iter()
            .chain(&raw.constraints)
            .any(|v| !v.is_finite())
        {
            return Err(fail("non-finite objective or constraint value".into()));
        }

        let violations: Vec<f64> = self
            .constraints
            .iter()
            .zip(&raw.constraints)
            .map(|(spec, &value)| spec.violation(value))
            .collect();
        let penalty: f64 = self
            .constraints
            .iter()
            .zip(&violations)
            .map(|(spec, &v)| v / spec.scale())
            .sum::<f64>()
            * PENALTY;
        let objectives = if penalty > 0.0 {
            raw.objectives.iter().map(|f| f + penalty).collect()
        } else {
            raw.objectives.clone()
        };

        Ok(Individual {
            decision: decision.clone(),
            objectives,
            raw_objectives: raw.objectives,
            constraints: raw.constraints,
            violations,
            rank: 0,
            cd: 0.0,
            rd: 0.0,
            score: 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constrained() -> Problem {
        let vars = vec![VariableSpec::continuous("x", 0.0, 2.0).unwrap()];
        Problem::new(
            "toy",
            vars,
            2,
            vec![ConstraintSpec::at_most("fdh", 1.5)],
            |g: &[f64]| {
                Ok(RawEvaluation {
                    objectives: vec![g[0], 1.0 - g[0]],
                    constraints: vec![g[0]],
                })
            },
        )
        .unwrap()
    }

    #[test]
    fn penalty_inflates_every_objective() {
        let p = constrained();
        let ind = p.evaluate(&vec![1.6].into()).unwrap();
        let expected = PENALTY * (0.1 / 1.5);
        assert!((ind.violations[0] - 0.1).abs() < 1e-12);
        for (f, raw) in ind.objectives.iter().zip(&ind.raw_objectives) {
            assert!((f - raw - expected).abs() < 1e-6);
        }
        assert!(!ind.is_feasible());
    }

    #[test]
    fn feasible_point_is_unpenalized() {
        let ind = constrained().evaluate(&vec![1.0].into()).unwrap();
        assert_eq!(ind.objectives, ind.raw_objectives);
        assert!(ind.is_feasible());
    }

    #[test]
    fn at_least_constraint_mirrors() {
        let c = ConstraintSpec::at_least("c", 2.0);
        assert_eq!(c.violation(1.5), 0.5);
        assert_eq!(c.violation(2.5), 0.0);
    }

    #[test]
    fn out_of_bounds_gene_is_domain_error() {
        let err = constrained().evaluate(&vec![3.0].into()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn evaluator_failure_carries_decision() {
        let vars = vec![VariableSpec::continuous("x", 0.0, 1.0).unwrap()];
        let p = Problem::new("bad", vars, 2, vec![], |_: &[f64]| Err("boom".to_string())).unwrap();
        match p.evaluate(&vec![0.5].into()) {
            Err(Error::Evaluation { decision, message }) => {
                assert_eq!(decision, vec![0.5]);
                assert_eq!(message, "boom");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn discrete_repair_snaps_with_low_ties() {
        let v = VariableSpec::discrete("e", vec![1.0, 1.02, 1.04]).unwrap();
        assert_eq!(v.repair(1.01), 1.0);
        assert_eq!(v.repair(1.011), 1.02);
        assert_eq!(v.repair(0.5), 1.0);
        assert_eq!(v.repair(9.0), 1.04);
        assert!(v.contains(1.02));
        assert!(!v.contains(1.03));
    }

    #[test]
    fn discrete_levels_must_increase() {
        assert!(VariableSpec::discrete("e", vec![1.0, 1.0]).is_err());
        assert!(VariableSpec::discrete("e", vec![]).is_err());
        assert!(VariableSpec::continuous("x", 1.0, 0.0).is_err());
    }

    #[test]
    fn single_objective_rejected() {
        let vars = vec![VariableSpec::continuous("x", 0.0, 1.0).unwrap()];
        let r = Problem::new("p", vars, 1, vec![], |g: &[f64]| {
            Ok(RawEvaluation::unconstrained(vec![g[0]]))
        });
        assert!(r.is_err());
    }

    #[test]
    fn evaluate_is_bit_identical() {
        let p = constrained();
        let d: DecisionVector = vec![1.7].into();
        assert_eq!(p.evaluate(&d).unwrap(), p.evaluate(&d).unwrap());
    }
}
