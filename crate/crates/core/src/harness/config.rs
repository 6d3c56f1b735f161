//! Flat `key = value` run configuration.
//!
//! ```text
//! # comment
//! include = base.cfg          # resolved relative to this file
//! problem = dtlz2-10-3obj
//! seeds = 1..5                # or 1, 2, 3
//! islands = nsga3:blend, nsga2, moead, spea2
//! ```
//!
//! Later assignments override earlier ones; an include is expanded in
//! place. The only environment input is `MAEO_OUT`, which replaces the
//! output directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::benchmarks::ProblemId;
use crate::ensemble::EnsembleConfig;
use crate::error::{Error, Result};
use crate::islands::{AlgorithmKind, IslandAlgorithmSpec};
use crate::parallel::Workers;
use crate::variation::VariationConfig;

pub const OUT_ENV: &str = "MAEO_OUT";

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Ordered key-value pairs with includes expanded.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut kv = Self::default();
        kv.absorb(text, None, &mut Vec::new())?;
        Ok(kv)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut kv = Self::default();
        kv.absorb_file(path, &mut Vec::new())?;
        Ok(kv)
    }

    fn absorb_file(&mut self, path: &Path, stack: &mut Vec<PathBuf>) -> Result<()> {
        let canonical = path
            .canonicalize()
            .map_err(|e| config_err(format!("cannot open {}: {e}", path.display())))?;
        if stack.contains(&canonical) {
            return Err(config_err(format!("include cycle at {}", path.display())));
        }
        let text = std::fs::read_to_string(&canonical)?;
        stack.push(canonical.clone());
        let result = self.absorb(&text, canonical.parent(), stack);
        stack.pop();
        result
    }

    fn absorb(&mut self, text: &str, dir: Option<&Path>, stack: &mut Vec<PathBuf>) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim().to_ascii_lowercase(), value.trim().to_string());
            if key.is_empty() {
                return Err(config_err(format!("line {}: empty key", lineno + 1)));
            }
            if key == "include" {
                let target = match dir {
                    Some(d) => d.join(&value),
                    None => PathBuf::from(&value),
                };
                self.absorb_file(&target, stack)?;
            } else {
                self.entries.insert(key, value);
            }
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_ascii_lowercase(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| config_err(format!("{key}: {e}")))
            })
            .transpose()
    }
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// `1, 4, 9` or an inclusive range `1..20`.
pub fn parse_seeds(v: &str) -> Result<Vec<u64>> {
    if let Some((lo, hi)) = v.split_once("..") {
        let lo: u64 = lo
            .trim()
            .parse()
            .map_err(|e| config_err(format!("seeds: {e}")))?;
        let hi: u64 = hi
            .trim()
            .parse()
            .map_err(|e| config_err(format!("seeds: {e}")))?;
        if hi < lo {
            return Err(config_err("seeds: empty range"));
        }
        return Ok((lo..=hi).collect());
    }
    split_list(v)
        .map(|s| s.parse().map_err(|e| config_err(format!("seeds: {e}"))))
        .collect()
}

/// `kind[:blend|:sbx]`, e.g. `nsga3:blend`.
pub fn parse_island(token: &str, position: usize) -> Result<IslandAlgorithmSpec> {
    let (kind, variation) = match token.split_once(':') {
        Some((k, v)) => (k, Some(v.trim())),
        None => (token, None),
    };
    let kind = AlgorithmKind::from_str(kind)?;
    let mut spec = IslandAlgorithmSpec::new(format!("island{}-{kind}", position + 1), kind);
    match variation {
        None | Some("sbx") => {}
        Some("blend") => spec = spec.with_variation(VariationConfig::blend_default()),
        Some(other) => return Err(config_err(format!("unknown variation {other:?}"))),
    }
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Indicator {
    Hv,
    Igd,
}

impl FromStr for Indicator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hv" => Ok(Self::Hv),
            "igd" => Ok(Self::Igd),
            other => Err(config_err(format!("unknown indicator {other:?}"))),
        }
    }
}

impl std::fmt::Display for Indicator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Hv => "hv",
            Self::Igd => "igd",
        })
    }
}

/// One algorithm run alone on a single population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleConfig {
    pub algorithm: IslandAlgorithmSpec,
    pub population: usize,
    pub generations: usize,
}

impl SingleConfig {
    /// Evaluations including the initial population.
    pub fn evaluation_budget(&self) -> usize {
        self.population * (self.generations + 1)
    }

    pub fn validate(&self) -> Result<()> {
        self.algorithm.validate()?;
        if self.population == 0 || self.generations == 0 {
            return Err(config_err(
                "single-algorithm population and generations must be positive",
            ));
        }
        Ok(())
    }
}

/// What a run executes: the ensemble, or one algorithm alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Contender {
    Maeo(EnsembleConfig),
    Single(SingleConfig),
}

impl Contender {
    pub fn evaluation_budget(&self) -> usize {
        match self {
            Self::Maeo(c) => c.evaluation_budget(),
            Self::Single(s) => s.evaluation_budget(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Maeo(_) => "maeo".into(),
            Self::Single(s) => s.algorithm.kind.to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Maeo(c) => c.validate(),
            Self::Single(s) => s.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problems: Vec<ProblemId>,
    /// The first contender takes the ensemble's slot in comparisons.
    pub contenders: Vec<Contender>,
    pub seeds: Vec<u64>,
    pub workers: Workers,
    /// Independent runs executed at once by a campaign.
    pub parallel_runs: usize,
    pub out: PathBuf,
    pub indicators: Vec<Indicator>,
    pub reference_front_size: usize,
    pub alpha: f64,
}

/// Keys understood by [`RunConfig::from_key_values`].
pub const KNOWN_KEYS: &[&str] = &[
    "problem",
    "problems",
    "mode",
    "algorithm",
    "compare",
    "islands",
    "population",
    "cycles",
    "generations",
    "convergence_assist",
    "record_evaluations",
    "single.population",
    "single.generations",
    "seeds",
    "workers.islands",
    "workers.eval",
    "workers.runs",
    "out",
    "indicators",
    "reference_front_size",
    "alpha",
];

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_key_values(&KeyValues::load(path)?, std::env::var(OUT_ENV).ok())
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        Self::from_key_values(&KeyValues::parse_str(text)?, None)
    }

    /// Builds a config; `out_override` (normally `MAEO_OUT`) wins over `out`.
    pub fn from_key_values(kv: &KeyValues, out_override: Option<String>) -> Result<Self> {
        if let Some(unknown) = kv.keys().find(|k| !KNOWN_KEYS.contains(k)) {
            return Err(config_err(format!("unknown key {unknown:?}")));
        }
        let problems: Vec<ProblemId> = match (kv.get("problems"), kv.get("problem")) {
            (Some(list), _) => split_list(list)
                .map(ProblemId::from_str)
                .collect::<Result<_>>()?,
            (None, Some(one)) => vec![one.parse()?],
            (None, None) => return Err(config_err("missing key \"problem\"")),
        };

        let mut ensemble = EnsembleConfig::default();
        if let Some(list) = kv.get("islands") {
            ensemble.islands = split_list(list)
                .enumerate()
                .map(|(i, t)| parse_island(t, i))
                .collect::<Result<_>>()?;
        }
        ensemble.population = kv.parsed("population")?.unwrap_or(ensemble.population);
        ensemble.cycles = kv.parsed("cycles")?.unwrap_or(ensemble.cycles);
        ensemble.generations = kv.parsed("generations")?.unwrap_or(ensemble.generations);
        ensemble.convergence_assist = kv
            .parsed("convergence_assist")?
            .unwrap_or(ensemble.convergence_assist);
        ensemble.record_evaluations = kv.parsed("record_evaluations")?.unwrap_or(false);

        // single-algorithm runs default to the ensemble's budget
        let single_population = kv
            .parsed("single.population")?
            .unwrap_or(ensemble.islands.len() * ensemble.population);
        let single_generations = kv
            .parsed("single.generations")?
            .unwrap_or(ensemble.cycles * ensemble.generations);
        let single = |token: &str| -> Result<Contender> {
            let spec = parse_island(token, 0)?;
            let mut algorithm = spec.clone();
            algorithm.id = spec.kind.to_string();
            Ok(Contender::Single(SingleConfig {
                algorithm,
                population: single_population,
                generations: single_generations,
            }))
        };
        let contender = |token: &str| -> Result<Contender> {
            if token.eq_ignore_ascii_case("maeo") {
                Ok(Contender::Maeo(ensemble.clone()))
            } else {
                single(token)
            }
        };

        let contenders = match kv.get("compare") {
            Some(list) => split_list(list)
                .map(contender)
                .collect::<Result<Vec<_>>>()?,
            None => match kv.get("mode").unwrap_or("maeo") {
                "maeo" => vec![Contender::Maeo(ensemble.clone())],
                "single" | "single-algorithm" => {
                    let algo = kv
                        .get("algorithm")
                        .ok_or_else(|| config_err("single-algorithm mode needs \"algorithm\""))?;
                    vec![single(algo)?]
                }
                other => return Err(config_err(format!("unknown mode {other:?}"))),
            },
        };

        let seeds = match kv.get("seeds") {
            Some(v) => parse_seeds(v)?,
            None => vec![0],
        };
        let workers = Workers::new(
            kv.parsed("workers.islands")?.unwrap_or(1),
            kv.parsed("workers.eval")?.unwrap_or(1),
        )?;
        let indicators = match kv.get("indicators") {
            Some(v) => split_list(v)
                .map(Indicator::from_str)
                .collect::<Result<_>>()?,
            None => vec![Indicator::Hv, Indicator::Igd],
        };
        let out = out_override
            .filter(|s| !s.is_empty())
            .or_else(|| kv.get("out").map(str::to_string))
            .unwrap_or_else(|| "maeo-out".into());

        let cfg = Self {
            problems,
            contenders,
            seeds,
            workers,
            parallel_runs: kv.parsed("workers.runs")?.unwrap_or(1),
            out: PathBuf::from(out),
            indicators,
            reference_front_size: kv.parsed("reference_front_size")?.unwrap_or(1000),
            alpha: kv.parsed("alpha")?.unwrap_or(0.05),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() {
            return Err(config_err("no problem given"));
        }
        if self.contenders.is_empty() {
            return Err(config_err("no algorithm given"));
        }
        if self.seeds.is_empty() {
            return Err(config_err("seeds must be non-empty"));
        }
        if self.parallel_runs == 0 {
            return Err(config_err("workers.runs must be at least 1"));
        }
        if self.indicators.is_empty() {
            return Err(config_err("at least one indicator is required"));
        }
        if self.reference_front_size == 0 {
            return Err(config_err("reference_front_size must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(config_err("alpha must lie in (0, 1)"));
        }
        for c in &self.contenders {
            c.validate()?;
        }
        Ok(())
    }
}
