//! Benchmark problems and their analytic Pareto fronts.
//!
//! Ids: `zdt<k>-<n>` (2 objectives), `dtlz<k>-<n>-<m>obj` (`dtlz<k>-<n>`
//! defaults to 3 objectives) and `smr-eq-cycle`.

pub mod dtlz;
pub mod smr;
pub mod zdt;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::problem::{Problem, RawEvaluation, VariableSpec};

pub use smr::{lcoe, lcoe_from_costs, make_smr_problem, LcoeParameters};

/// Variable counts and DTLZ objective counts used in the comparison study.
pub const STUDY_VARIABLE_COUNTS: [usize; 3] = [10, 30, 50];
pub const STUDY_DTLZ_OBJECTIVES: [usize; 3] = [3, 5, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Zdt,
    Dtlz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub family: Family,
    pub index: usize,
    pub n_vars: usize,
    pub n_objectives: usize,
}

impl BenchmarkSpec {
    pub fn zdt(index: usize, n_vars: usize) -> Result<Self> {
        Self {
            family: Family::Zdt,
            index,
            n_vars,
            n_objectives: 2,
        }
        .validated()
    }

    pub fn dtlz(index: usize, n_vars: usize, n_objectives: usize) -> Result<Self> {
        Self {
            family: Family::Dtlz,
            index,
            n_vars,
            n_objectives,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self.family {
            Family::Zdt => {
                if ![1, 2, 3, 4, 6].contains(&self.index) {
                    return Err(domain(format!("no ZDT{} benchmark", self.index)));
                }
                if self.n_objectives != 2 {
                    return Err(domain("ZDT problems have 2 objectives"));
                }
                if self.n_vars < 2 {
                    return Err(domain("ZDT problems need at least 2 variables"));
                }
            }
            Family::Dtlz => {
                if !(1..=7).contains(&self.index) {
                    return Err(domain(format!("no DTLZ{} benchmark", self.index)));
                }
                if self.n_objectives < 2 {
                    return Err(domain("DTLZ problems need at least 2 objectives"));
                }
                if self.n_vars < self.n_objectives {
                    return Err(domain(format!(
                        "DTLZ with {} objectives needs at least {} variables",
                        self.n_objectives, self.n_objectives
                    )));
                }
            }
        }
        Ok(self)
    }

    pub fn parse(id: &str) -> Result<Self> {
        let bad = || domain(format!("unrecognized benchmark id {id:?}"));
        let id = id.trim().to_ascii_lowercase();
        let (family, rest) = if let Some(r) = id.strip_prefix("zdt") {
            (Family::Zdt, r)
        } else if let Some(r) = id.strip_prefix("dtlz") {
            (Family::Dtlz, r)
        } else {
            return Err(bad());
        };
        let parts: Vec<&str> = rest.split('-').collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
        match (family, parts.as_slice()) {
            (Family::Zdt, [k, n]) => Self::zdt(num(k)?, num(n)?),
            (Family::Dtlz, [k, n]) => Self::dtlz(num(k)?, num(n)?, 3),
            (Family::Dtlz, [k, n, m]) => {
                let m = m.strip_suffix("obj").ok_or_else(bad)?;
                Self::dtlz(num(k)?, num(n)?, num(m)?)
            }
            _ => Err(bad()),
        }
    }

    /// The full comparison matrix: ZDT1-4,6 and DTLZ1-7 (3, 5 and 10
    /// objectives), each at 10, 30 and 50 variables.
    pub fn study_matrix() -> Vec<Self> {
        let mut out = Vec::new();
        for n in STUDY_VARIABLE_COUNTS {
            for k in [1, 2, 3, 4, 6] {
                out.push(Self::zdt(k, n).expect("valid"));
            }
            for m in STUDY_DTLZ_OBJECTIVES {
                for k in 1..=7 {
                    out.push(Self::dtlz(k, n, m).expect("valid"));
                }
            }
        }
        out
    }
}

impl fmt::Display for BenchmarkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Zdt => write!(f, "zdt{}-{}", self.index, self.n_vars),
            Family::Dtlz => write!(
                f,
                "dtlz{}-{}-{}obj",
                self.index, self.n_vars, self.n_objectives
            ),
        }
    }
}

/// Any problem addressable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProblemId {
    Benchmark(BenchmarkSpec),
    SmrEquilibrium,
}

pub const SMR_ID: &str = "smr-eq-cycle";

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case(SMR_ID) {
            Ok(Self::SmrEquilibrium)
        } else {
            BenchmarkSpec::parse(s).map(Self::Benchmark)
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Benchmark(b) => b.fmt(f),
            Self::SmrEquilibrium => f.write_str(SMR_ID),
        }
    }
}

impl ProblemId {
    pub fn make_problem(&self) -> Result<Problem> {
        match self {
            Self::Benchmark(b) => make_benchmark(b),
            Self::SmrEquilibrium => make_smr_problem(LcoeParameters::default()),
        }
    }

    /// Analytic front, when one exists.
    pub fn reference_front(&self, n_points: usize) -> Option<Vec<Vec<f64>>> {
        match self {
            Self::Benchmark(b) => Some(reference_front(b, n_points)),
            Self::SmrEquilibrium => None,
        }
    }
}

pub fn make_benchmark(spec: &BenchmarkSpec) -> Result<Problem> {
    let spec = spec.validated()?;
    let vars = (0..spec.n_vars)
        .map(|k| {
            let (lo, hi) = match spec.family {
                Family::Zdt => zdt::bounds(spec.index, k),
                Family::Dtlz => (0.0, 1.0),
            };
            VariableSpec::continuous(format!("x{}", k + 1), lo, hi)
        })
        .collect::<Result<Vec<_>>>()?;
    let name = spec.to_string();
    match spec.family {
        Family::Zdt => Problem::new(name, vars, 2, vec![], move |x: &[f64]| {
            Ok(RawEvaluation::unconstrained(
                zdt::evaluate(spec.index, x).to_vec(),
            ))
        }),
        Family::Dtlz => Problem::new(name, vars, spec.n_objectives, vec![], move |x: &[f64]| {
            Ok(RawEvaluation::unconstrained(dtlz::evaluate(
                spec.index,
                x,
                spec.n_objectives,
            )))
        }),
    }
}

/// Samples the analytic Pareto front.
///
/// Two-objective and curve fronts get exactly `n_points` points. Simplex
/// and sphere fronts use the largest simplex lattice with at most
/// `n_points` points; DTLZ7 with more than two objectives uses the largest
/// product grid with at most `n_points` points.
pub fn reference_front(spec: &BenchmarkSpec, n_points: usize) -> Vec<Vec<f64>> {
    let n = n_points.max(1);
    let m = spec.n_objectives;
    match (spec.family, spec.index) {
        (Family::Zdt, 1 | 4) => {
            // evenly spaced in f2 = 1 - sqrt(f1)
            linspace(n).map(|t| vec![t * t, 1.0 - t]).collect()
        }
        (Family::Zdt, 2) => linspace(n)
            .map(|f1| vec![f1, zdt::front_curve(2, f1)])
            .collect(),
        (Family::Zdt, 6) => {
            let lo = zdt::zdt6_min_f1();
            linspace(n)
                .map(|t| {
                    let f1 = lo + t * (1.0 - lo);
                    vec![f1, zdt::front_curve(6, f1)]
                })
                .collect()
        }
        (Family::Zdt, _) => {
            let segments = leading_segments(|f| zdt::front_curve(3, f), 0.0, 1.0);
            sample_segments(&segments, n)
                .into_iter()
                .map(|f1| vec![f1, zdt::front_curve(3, f1)])
                .collect()
        }
        (Family::Dtlz, 1) => lattice_front(m, n)
            .into_iter()
            .map(|w| w.iter().map(|v| 0.5 * v).collect())
            .collect(),
        (Family::Dtlz, 2..=4) => lattice_front(m, n)
            .into_iter()
            .map(|w| {
                let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                w.iter().map(|v| v / norm).collect()
            })
            .collect(),
        (Family::Dtlz, 5 | 6) => linspace(n)
            .map(|t| dtlz::degenerate_front_point(t, m))
            .collect(),
        (Family::Dtlz, _) => dtlz7_front(m, n),
    }
}

fn linspace(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| {
        if n == 1 {
            0.0
        } else {
            i as f64 / (n - 1) as f64
        }
    })
}

fn lattice_front(m: usize, n: usize) -> Vec<Vec<f64>> {
    use crate::islands::{auto_partitions, das_dennis_directions};
    das_dennis_directions(m, auto_partitions(m, n))
}

/// Sub-intervals of `[lo, hi]` where `psi` attains a new running minimum,
/// i.e. the non-dominated part of the curve `(f, psi(f))`. Crossings are
/// bracketed on a fine scan and refined by bisection.
fn leading_segments(psi: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    const SCAN: usize = 20_000;
    let step = (hi - lo) / SCAN as f64;
    let mut segments = Vec::new();
    let mut start = lo;
    let mut best = psi(lo);
    let mut inside = true;
    let mut prev = lo;
    for i in 1..=SCAN {
        let f = lo + i as f64 * step;
        let v = psi(f);
        if inside {
            if v < best {
                best = v;
            } else {
                // running minimum ends at a local minimum between prev-step and f
                let end = golden_min(&psi, (prev - step).max(lo), f);
                best = psi(end);
                segments.push((start, end));
                inside = false;
            }
        } else if v < best {
            // psi drops back below the last minimum between prev and f
            let (mut a, mut b) = (prev, f);
            for _ in 0..100 {
                let mid = 0.5 * (a + b);
                if psi(mid) < best {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            start = b;
            best = v;
            inside = true;
        }
        prev = f;
    }
    if inside {
        segments.push((start, hi));
    }
    segments
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - gr * (b - a);
        let d = a + gr * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// `n` points spread by length over the segments, at cell midpoints so a
/// segment's dominated start point is never emitted.
fn sample_segments(segments: &[(f64, f64)], n: usize) -> Vec<f64> {
    let total: f64 = segments.iter().map(|(a, b)| b - a).sum();
    (0..n)
        .map(|i| {
            let mut s = (i as f64 + 0.5) / n as f64 * total;
            for &(a, b) in segments {
                if s <= b - a {
                    return a + s;
                }
                s -= b - a;
            }
            segments.last().map_or(0.0, |s| s.1)
        })
        .collect()
}

/// DTLZ7 front: `f_M = 2 (M - Σ φ(f_i) / 2)` with `φ(f) = f (1 + sin 3πf)`
/// separates, so the front is the product of the 1-D segments where `φ`
/// reaches a new running maximum.
fn dtlz7_front(m: usize, n: usize) -> Vec<Vec<f64>> {
    use std::f64::consts::PI;
    let phi = |f: f64| f * (1.0 + (3.0 * PI * f).sin());
    let segments = leading_segments(|f| -phi(f), 0.0, 1.0);
    let axes = m - 1;
    let mut per_axis = 1usize;
    while (per_axis + 1).pow(axes as u32) <= n {
        per_axis += 1;
    }
    let coords = sample_segments(&segments, per_axis);
    let mut out = Vec::with_capacity(per_axis.pow(axes as u32));
    let mut idx = vec![0usize; axes];
    loop {
        let mut p: Vec<f64> = idx.iter().map(|&i| coords[i]).collect();
        let last = 2.0 * m as f64 - p.iter().map(|&f| phi(f)).sum::<f64>();
        p.push(last);
        out.push(p);
        let mut k = 0;
        while k < axes {
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == axes {
            break;
        }
    }
    out
}
