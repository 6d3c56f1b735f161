//! CSV artifacts of a run. Headers are fixed, numbers use Rust's shortest
//! round-trip formatting and lines end in LF, so identical runs produce
//! identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::ensemble::RunResult;
use crate::error::{Error, Result};
use crate::problem::Individual;

pub const CYCLES_FILE: &str = "cycles.csv";
pub const MOBILITY_FILE: &str = "mobility.csv";
pub const FRONT_FILE: &str = "front.csv";
pub const ARCHIVE_FILE: &str = "archive.csv";

pub const CYCLES_HEADER: &str = "cycle,phase,island,island_id,active,hv,population,feasible,g,h,e,rho,theta,phi,combined_hv,archive_size,evaluations";

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// One row per (cycle, island).
pub fn cycles_csv(result: &RunResult) -> String {
    let mut s = String::from(CYCLES_HEADER);
    s.push('\n');
    for c in &result.cycles {
        let phase = match c.phase {
            crate::diagnostics::Phase::Migration => "migration",
            crate::diagnostics::Phase::Solo => "solo",
        };
        for i in &c.islands {
            writeln!(
                s,
                "{},{phase},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                c.cycle,
                i.index,
                i.id,
                u8::from(i.active),
                opt(i.hv),
                i.population,
                i.feasible,
                opt(i.g),
                opt(i.h),
                i.exported,
                i.received,
                num(c.theta),
                num(c.phi),
                num(c.combined_hv),
                c.archive_size,
                c.evaluations
            )
            .expect("writing to a String");
        }
    }
    s
}

/// Mobility matrix entries: probability that an export of `from` lands on `to`.
pub fn mobility_csv(result: &RunResult) -> String {
    let mut s = String::from("cycle,to,from,probability\n");
    for m in result.cycles.iter().filter_map(|c| c.mobility.as_ref()) {
        for (j, row) in m.m.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                writeln!(
                    s,
                    "{},{},{},{}",
                    m.cycle,
                    m.islands[j],
                    m.islands[i],
                    num(*v)
                )
                .expect("writing to a String");
            }
        }
    }
    s
}

/// Raw objectives, feasibility flag, total violation and decision genes.
pub fn individuals_csv(members: &[Individual]) -> String {
    let (m, n) = members.first().map_or((0, 0), |i| {
        (i.raw_objectives.len(), i.decision.genes().len())
    });
    let mut cols: Vec<String> = (1..=m).map(|k| format!("f{k}")).collect();
    cols.push("feasible".into());
    cols.push("violation".into());
    cols.extend((1..=n).map(|k| format!("x{k}")));
    let mut s = cols.join(",");
    s.push('\n');
    for ind in members {
        let mut fields: Vec<String> = ind.raw_objectives.iter().map(|v| num(*v)).collect();
        fields.push(u8::from(ind.is_feasible()).to_string());
        fields.push(num(ind.violations.iter().sum()));
        fields.extend(ind.decision.genes().iter().map(|v| num(*v)));
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

/// Writes every CSV of one run into `dir`; returns the written paths.
pub fn write_run(dir: &Path, result: &RunResult) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let files = [
        (CYCLES_FILE, cycles_csv(result)),
        (MOBILITY_FILE, mobility_csv(result)),
        (FRONT_FILE, individuals_csv(&result.final_front)),
        (ARCHIVE_FILE, individuals_csv(&result.archive)),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}

/// Reads the objective columns (`f1`, `f2`, …) of a front CSV, keeping only
/// rows flagged feasible when a `feasible` column is present.
pub fn read_front_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    parse_front_csv(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn parse_front_csv(text: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or("empty file")?
        .split(',')
        .map(str::trim)
        .collect();
    let is_objective =
        |h: &str| h.len() > 1 && h.starts_with('f') && h[1..].chars().all(|c| c.is_ascii_digit());
    let objective_cols: Vec<usize> = (0..header.len())
        .filter(|&k| is_objective(header[k]))
        .collect();
    // headerless numeric files: every column is an objective
    let (objective_cols, feasible_col, data): (Vec<usize>, Option<usize>, Vec<&str>) =
        if objective_cols.is_empty() {
            if header.iter().all(|h| h.parse::<f64>().is_ok()) {
                let first = text
                    .lines()
                    .find(|l| !l.trim().is_empty())
                    .expect("checked above");
                (
                    (0..header.len()).collect(),
                    None,
                    std::iter::once(first).chain(lines).collect(),
                )
            } else {
                return Err("no objective columns (f1, f2, ...)".into());
            }
        } else {
            (
                objective_cols,
                header.iter().position(|h| *h == "feasible"),
                lines.collect(),
            )
        };
    let mut out = Vec::new();
    for (k, line) in data.iter().enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let get = |c: usize| -> std::result::Result<f64, String> {
            fields
                .get(c)
                .ok_or_else(|| format!("row {}: missing column {}", k + 1, c + 1))?
                .parse::<f64>()
                .map_err(|e| format!("row {}: {e}", k + 1))
        };
        if let Some(fc) = feasible_col {
            if get(fc)? == 0.0 {
                continue;
            }
        }
        out.push(
            objective_cols
                .iter()
                .map(|&c| get(c))
                .collect::<std::result::Result<Vec<_>, _>>()?,
        );
    }
    Ok(out)
}
