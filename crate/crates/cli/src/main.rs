use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use maeo::benchmarks::{BenchmarkSpec, ProblemId, SMR_ID};
use maeo::harness::campaign::{runs_csv, RUNS_CSV};
use maeo::harness::config::OUT_ENV;
use maeo::harness::output::read_front_csv;
use maeo::harness::{execute, run_campaign, KeyValues, RunConfig};
use maeo::indicators::{hv, hv_method, igd, nadir_of, FrontSet, HvMethod};
use maeo::parallel::Workers;

#[derive(Parser)]
#[command(
    name = "maeo",
    version,
    about = "Hypervolume-driven island ensemble optimizer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured seed and write per-run CSVs.
    Run(RunArgs),
    /// Run a sweep and compare the first algorithm against the others.
    Campaign(RunArgs),
    /// Hypervolume of a front CSV.
    Hv {
        front: PathBuf,
        /// Comma-separated reference point; defaults to the front's nadir.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        reference: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// IGD of a front CSV against an analytic or given reference front.
    Igd {
        front: PathBuf,
        /// Benchmark id whose analytic front is sampled.
        #[arg(long, conflicts_with = "reference_front")]
        problem: Option<String>,
        #[arg(long)]
        reference_front: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Benchmark registry.
    Bench {
        #[command(subcommand)]
        action: BenchAction,
    },
}

#[derive(Subcommand)]
enum BenchAction {
    /// Print every addressable problem id.
    List,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem id, overriding the config's.
    #[arg(long)]
    problem: Option<String>,
    /// Run this seed only.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers_islands: Option<usize>,
    #[arg(long)]
    workers_eval: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut kv = match &self.config {
            Some(path) => {
                KeyValues::load(path).with_context(|| format!("reading {}", path.display()))?
            }
            None => KeyValues::default(),
        };
        if let Some(p) = &self.problem {
            kv.set("problem", p.as_str());
            kv.set("problems", p.as_str());
        }
        if kv.get("problem").is_none() && kv.get("problems").is_none() {
            bail!("give --config with a `problem` key, or --problem");
        }
        if let Some(s) = self.seed {
            kv.set("seeds", s.to_string());
        }
        let mut cfg = RunConfig::from_key_values(&kv, std::env::var(OUT_ENV).ok())?;
        cfg.workers = Workers::new(
            self.workers_islands.unwrap_or(cfg.workers.islands),
            self.workers_eval.unwrap_or(cfg.workers.evaluators),
        )?;
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        Ok(cfg)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6}"))
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let cfg = args.load()?;
    let (runs, references) = execute(&cfg)?;
    std::fs::write(cfg.out.join(RUNS_CSV), runs_csv(&runs))?;
    for r in &references {
        println!("{}: reference point {:?}", r.problem, r.reference_point);
    }
    println!(
        "{:<18} {:<14} {:>6} {:>8} {:>8} {:>12} {:>12}",
        "problem", "algorithm", "seed", "evals", "archive", "hv", "igd"
    );
    for r in &runs {
        println!(
            "{:<18} {:<14} {:>6} {:>8} {:>8} {:>12} {:>12}",
            r.problem,
            r.algorithm,
            r.seed,
            r.evaluations,
            r.archive_size,
            fmt_opt(r.hv),
            fmt_opt(r.igd)
        );
    }
    println!("wrote {}", cfg.out.display());
    Ok(())
}

fn cmd_campaign(args: &RunArgs) -> Result<()> {
    let cfg = args.load()?;
    let report = run_campaign(&cfg)?;
    println!(
        "budget {} evaluations per run, {} seeds",
        report.evaluation_budget,
        report.seeds.len()
    );
    for r in &report.references {
        println!("{}: reference point {:?}", r.problem, r.reference_point);
    }
    println!(
        "{:<18} {:<5} {:<14} {:<14} {:>10} {:>12} verdict",
        "problem", "ind", "baseline", "opponent", "W", "p"
    );
    for c in &report.comparisons {
        println!(
            "{:<18} {:<5} {:<14} {:<14} {:>10} {:>12} {}",
            c.problem,
            c.indicator.to_string(),
            c.baseline,
            c.opponent,
            fmt_opt(c.test.as_ref().map(|t| t.statistic)),
            c.test
                .as_ref()
                .map_or_else(|| "-".into(), |t| format!("{:.3e}", t.p_value)),
            c.verdict.symbol()
        );
        if let Some(note) = &c.note {
            println!("    note: {note}");
        }
    }
    println!("wrote {}", cfg.out.display());
    Ok(())
}

fn load_front(path: &Path) -> Result<Vec<Vec<f64>>> {
    let front = read_front_csv(path)?;
    if front.is_empty() {
        bail!("{} has no feasible rows", path.display());
    }
    Ok(front)
}

fn cmd_hv(front: &Path, reference: Option<Vec<f64>>, seed: u64) -> Result<()> {
    let points = load_front(front)?;
    let reference = match reference {
        Some(r) => r,
        None => nadir_of(&points).expect("non-empty front"),
    };
    let set = FrontSet::new(&points, &reference)?;
    let method = match hv_method(set.len(), set.dim()) {
        HvMethod::Exact => "exact",
        HvMethod::MonteCarlo => "monte-carlo",
    };
    let value = hv(&set, &mut maeo::seeded_rng(seed));
    println!("reference {reference:?}");
    println!(
        "points {} (inside reference box {})",
        points.len(),
        set.len()
    );
    println!("hv {value} ({method})");
    Ok(())
}

fn cmd_igd(
    front: &Path,
    problem: Option<&str>,
    reference_front: Option<&Path>,
    samples: usize,
) -> Result<()> {
    let points = load_front(front)?;
    let reference = match (problem, reference_front) {
        (Some(id), _) => {
            let id: ProblemId = id.parse()?;
            id.reference_front(samples)
                .with_context(|| format!("{id} has no analytic front; pass --reference-front"))?
        }
        (None, Some(path)) => load_front(path)?,
        (None, None) => bail!("give --problem or --reference-front"),
    };
    println!("reference points {}", reference.len());
    println!("igd {}", igd(&points, &reference)?);
    Ok(())
}

fn cmd_bench_list() {
    // a closed pipe (e.g. `| head`) just ends the listing
    let mut out = std::io::stdout().lock();
    for spec in BenchmarkSpec::study_matrix() {
        if writeln!(out, "{spec}").is_err() {
            return;
        }
    }
    let _ = writeln!(out, "{SMR_ID}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Campaign(args) => cmd_campaign(args),
        Command::Hv {
            front,
            reference,
            seed,
        } => cmd_hv(front, reference.clone(), *seed),
        Command::Igd {
            front,
            problem,
            reference_front,
            samples,
        } => cmd_igd(
            front,
            problem.as_deref(),
            reference_front.as_deref(),
            *samples,
        ),
        Command::Bench {
            action: BenchAction::List,
        } => {
            cmd_bench_list();
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
