//! Multi-seed sweeps and paired comparisons.
//!
//! Every (problem, contender, seed) run writes its CSVs into its own
//! directory. Indicators are computed on final archives afterwards, against
//! one reference point per problem: the componentwise maximum of the nadirs
//! of every run's archive. The first contender is compared against each of
//! the others; verdict `+` means the first contender is better.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Contender, Indicator, RunConfig};
use super::output::write_run;
use super::run_contender;
use super::wilcoxon::{wilcoxon_signed_rank, Verdict, WilcoxonResult};
use crate::benchmarks::ProblemId;
use crate::ensemble::stream_rng;
use crate::error::{Error, Result};
use crate::indicators::{hv, igd, nadir_of, FrontSet};
use crate::parallel::Executor;

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";
pub const RUNS_CSV: &str = "runs.csv";

/// Stream used for Monte-Carlo HV when scoring archives.
const SCORING_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub contender: usize,
    pub algorithm: String,
    pub seed: u64,
    pub evaluations: usize,
    pub archive_size: usize,
    pub hv: Option<f64>,
    pub igd: Option<f64>,
    /// Run directory relative to the output root.
    pub dir: PathBuf,
    #[serde(skip)]
    archive: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemReference {
    pub problem: String,
    pub n_variables: usize,
    pub n_objectives: usize,
    /// Shared HV reference point; empty when no run found a feasible point.
    pub reference_point: Vec<f64>,
    /// Volume of the box between the origin and the reference point.
    pub box_volume: f64,
    /// HV of the sampled analytic front against the same reference.
    pub reference_front_hv: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub problem: String,
    pub n_variables: usize,
    pub n_objectives: usize,
    pub indicator: Indicator,
    pub baseline: String,
    pub opponent: String,
    pub opponent_index: usize,
    pub baseline_values: Vec<f64>,
    pub opponent_values: Vec<f64>,
    /// Test oriented so that a positive difference favours the baseline.
    pub test: Option<WilcoxonResult>,
    pub verdict: Verdict,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub alpha: f64,
    pub seeds: Vec<u64>,
    pub contenders: Vec<String>,
    pub evaluation_budget: usize,
    pub references: Vec<ProblemReference>,
    pub runs: Vec<RunRecord>,
    pub comparisons: Vec<Comparison>,
}

impl ComparisonReport {
    pub fn reference(&self, problem: &str) -> Option<&ProblemReference> {
        self.references.iter().find(|r| r.problem == problem)
    }

    pub fn comparison(
        &self,
        problem: &str,
        indicator: Indicator,
        opponent_index: usize,
    ) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| {
            c.problem == problem && c.indicator == indicator && c.opponent_index == opponent_index
        })
    }
}

/// Every contender must spend the same number of evaluations.
pub fn check_budgets(contenders: &[Contender]) -> Result<usize> {
    let first = contenders
        .first()
        .ok_or_else(|| Error::Config("no contenders".into()))?;
    let budget = first.evaluation_budget();
    for c in &contenders[1..] {
        if c.evaluation_budget() != budget {
            return Err(Error::Config(format!(
                "budget mismatch: {} uses {budget} evaluations, {} uses {}",
                first.name(),
                c.name(),
                c.evaluation_budget()
            )));
        }
    }
    Ok(budget)
}

pub fn run_dir(
    problem: &ProblemId,
    contender_index: usize,
    contender: &Contender,
    seed: u64,
) -> PathBuf {
    PathBuf::from(problem.to_string())
        .join(format!("{}-{}", contender_index + 1, contender.name()))
        .join(format!("seed-{seed}"))
}

struct Job {
    problem: usize,
    contender: usize,
    seed: u64,
}

fn run_job(cfg: &RunConfig, problems: &[crate::problem::Problem], job: &Job) -> Result<RunRecord> {
    let id = &cfg.problems[job.problem];
    let contender = &cfg.contenders[job.contender];
    let executor = Executor::new(cfg.workers)?;
    let result = run_contender(contender, &problems[job.problem], job.seed, &executor)?;
    let dir = run_dir(id, job.contender, contender, job.seed);
    write_run(&cfg.out.join(&dir), &result)?;
    Ok(RunRecord {
        problem: id.to_string(),
        contender: job.contender,
        algorithm: contender.name(),
        seed: job.seed,
        evaluations: result.evaluations,
        archive_size: result.archive.len(),
        hv: None,
        igd: None,
        dir,
        archive: result
            .archive
            .iter()
            .map(|i| i.raw_objectives.clone())
            .collect(),
    })
}

fn run_jobs(
    cfg: &RunConfig,
    problems: &[crate::problem::Problem],
    jobs: &[Job],
) -> Result<Vec<RunRecord>> {
    #[cfg(feature = "parallel")]
    if cfg.parallel_runs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallel_runs)
            .build()
            .map_err(|e| Error::Config(format!("cannot build run pool: {e}")))?;
        return pool.install(|| jobs.par_iter().map(|j| run_job(cfg, problems, j)).collect());
    }
    jobs.iter().map(|j| run_job(cfg, problems, j)).collect()
}

/// Runs every (problem, contender, seed) combination, writes the per-run
/// CSVs and scores each final archive. Returns the runs in job order and
/// one reference record per problem.
pub fn execute(cfg: &RunConfig) -> Result<(Vec<RunRecord>, Vec<ProblemReference>)> {
    cfg.validate()?;
    let problems = cfg
        .problems
        .iter()
        .map(ProblemId::make_problem)
        .collect::<Result<Vec<_>>>()?;
    let mut jobs = Vec::new();
    for problem in 0..cfg.problems.len() {
        for contender in 0..cfg.contenders.len() {
            for &seed in &cfg.seeds {
                jobs.push(Job {
                    problem,
                    contender,
                    seed,
                });
            }
        }
    }
    fs::create_dir_all(&cfg.out)?;
    let mut runs = run_jobs(cfg, &problems, &jobs)?;

    let mut references = Vec::new();
    for (k, id) in cfg.problems.iter().enumerate() {
        let name = id.to_string();
        let problem = &problems[k];
        let nadirs: Vec<Vec<f64>> = runs
            .iter()
            .filter(|r| r.problem == name)
            .filter_map(|r| nadir_of(&r.archive))
            .collect();
        let reference_point = nadir_of(&nadirs).unwrap_or_default();
        let front = id.reference_front(cfg.reference_front_size);
        let scoring_rng = |seed: u64| stream_rng(seed, SCORING_STREAM);

        for r in runs.iter_mut().filter(|r| r.problem == name) {
            if cfg.indicators.contains(&Indicator::Hv) {
                r.hv = Some(if reference_point.is_empty() || r.archive.is_empty() {
                    0.0
                } else {
                    hv(
                        &FrontSet::from_non_dominated(&r.archive, &reference_point)?,
                        &mut scoring_rng(r.seed),
                    )
                });
            }
            if cfg.indicators.contains(&Indicator::Igd) {
                if let Some(front) = &front {
                    r.igd = Some(igd(&r.archive, front)?);
                }
            }
        }
        let reference_front_hv = match (&front, reference_point.is_empty()) {
            (Some(front), false) => Some(hv(
                &FrontSet::new(front, &reference_point)?,
                &mut scoring_rng(0),
            )),
            _ => None,
        };
        references.push(ProblemReference {
            problem: name,
            n_variables: problem.n_variables(),
            n_objectives: problem.n_objectives(),
            box_volume: reference_point.iter().product::<f64>(),
            reference_point,
            reference_front_hv,
        });
    }
    Ok((runs, references))
}

fn compare(
    reference: &ProblemReference,
    indicator: Indicator,
    baseline: (&str, Vec<f64>),
    opponent: (usize, &str, Vec<f64>),
    alpha: f64,
) -> Comparison {
    let (a, b) = (&baseline.1, &opponent.2);
    // orient so that a positive paired difference favours the baseline
    let test = match indicator {
        Indicator::Hv => wilcoxon_signed_rank(a, b, alpha),
        Indicator::Igd => wilcoxon_signed_rank(b, a, alpha),
    };
    let (test, verdict, note) = match test {
        Ok(t) => {
            let v = t.verdict;
            (Some(t), v, None)
        }
        Err(e) => (None, Verdict::Tie, Some(e.to_string())),
    };
    Comparison {
        problem: reference.problem.clone(),
        n_variables: reference.n_variables,
        n_objectives: reference.n_objectives,
        indicator,
        baseline: baseline.0.to_string(),
        opponent: opponent.1.to_string(),
        opponent_index: opponent.0,
        baseline_values: baseline.1,
        opponent_values: opponent.2,
        test,
        verdict,
        note,
    }
}

/// Runs the sweep, tests the first contender against every other one per
/// problem and indicator, and writes `runs.csv`, `report.csv` and
/// `report.json` into the output directory.
pub fn run_campaign(cfg: &RunConfig) -> Result<ComparisonReport> {
    let budget = check_budgets(&cfg.contenders)?;
    let (runs, references) = execute(cfg)?;
    let names: Vec<String> = cfg.contenders.iter().map(Contender::name).collect();
    let values = |problem: &str, contender: usize, indicator: Indicator| -> Option<Vec<f64>> {
        runs.iter()
            .filter(|r| r.problem == problem && r.contender == contender)
            .map(|r| match indicator {
                Indicator::Hv => r.hv,
                Indicator::Igd => r.igd,
            })
            .collect()
    };
    let mut comparisons = Vec::new();
    for reference in &references {
        for &indicator in &cfg.indicators {
            let Some(base) = values(&reference.problem, 0, indicator) else {
                continue;
            };
            for k in 1..cfg.contenders.len() {
                let Some(other) = values(&reference.problem, k, indicator) else {
                    continue;
                };
                comparisons.push(compare(
                    reference,
                    indicator,
                    (&names[0], base.clone()),
                    (k, &names[k], other),
                    cfg.alpha,
                ));
            }
        }
    }
    let report = ComparisonReport {
        alpha: cfg.alpha,
        seeds: cfg.seeds.clone(),
        contenders: names,
        evaluation_budget: budget,
        references,
        runs,
        comparisons,
    };
    write_report(&cfg.out, &report)?;
    Ok(report)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

pub fn runs_csv(runs: &[RunRecord]) -> String {
    let mut s =
        String::from("problem,contender,algorithm,seed,evaluations,archive_size,hv,igd,dir\n");
    for r in runs {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.problem,
            r.contender + 1,
            r.algorithm,
            r.seed,
            r.evaluations,
            r.archive_size,
            opt(r.hv),
            opt(r.igd),
            r.dir.display()
        )
        .expect("writing to a String");
    }
    s
}

pub fn report_csv(report: &ComparisonReport) -> String {
    let mut s = String::from("problem,n_variables,n_objectives,indicator,baseline,opponent,statistic,p_value,verdict,baseline_median,opponent_median\n");
    let median = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n == 0 {
            f64::NAN
        } else if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    };
    for c in &report.comparisons {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            c.problem,
            c.n_variables,
            c.n_objectives,
            c.indicator,
            c.baseline,
            c.opponent,
            opt(c.test.as_ref().map(|t| t.statistic)),
            opt(c.test.as_ref().map(|t| t.p_value)),
            c.verdict.symbol(),
            median(&c.baseline_values),
            median(&c.opponent_values)
        )
        .expect("writing to a String");
    }
    s
}

pub fn write_report(out: &Path, report: &ComparisonReport) -> Result<()> {
    fs::create_dir_all(out)?;
    fs::write(out.join(RUNS_CSV), runs_csv(&report.runs))?;
    fs::write(out.join(REPORT_CSV), report_csv(report))?;
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    fs::write(out.join(REPORT_JSON), json)?;
    Ok(())
}
