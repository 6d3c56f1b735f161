//! Paired two-sided Wilcoxon signed-rank test.
//!
//! Zero differences are dropped, the rest ranked by magnitude with average
//! ranks for ties. `W = min(W⁺, W⁻)`. Up to [`EXACT_LIMIT`] pairs the p-value
//! comes from the exact null distribution of the (possibly tied) rank sums;
//! above it from the normal approximation with tie-corrected variance.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{domain, Result};

/// Largest sample size handled by exact enumeration.
pub const EXACT_LIMIT: usize = 25;
/// Smallest non-zero sample size accepted.
pub const MIN_PAIRS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Significant, `a` larger.
    #[serde(rename = "+")]
    Plus,
    /// Significant, `a` smaller.
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "0")]
    Tie,
}

impl Verdict {
    pub fn symbol(self) -> &'static str {
        match self {
            Self::Plus => "+",
            Self::Minus => "-",
            Self::Tie => "0",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Self::Plus => Self::Minus,
            Self::Minus => Self::Plus,
            Self::Tie => Self::Tie,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PMethod {
    Exact,
    Normal,
    /// Every difference was zero.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Non-zero differences.
    pub n: usize,
    pub w_plus: f64,
    pub w_minus: f64,
    /// `min(W⁺, W⁻)`.
    pub statistic: f64,
    pub p_value: f64,
    pub method: PMethod,
    pub verdict: Verdict,
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Average ranks (1-based) of `values`, plus the tie-group sizes.
pub fn average_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let r = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = r;
        }
        ties.push(end - start);
        start = end;
    }
    (ranks, ties)
}

/// `P(S ≤ w)` where `S` sums a uniformly random subset of `ranks`.
/// Ranks are multiples of 1/2, so the distribution lives on doubled integers.
pub fn exact_lower_tail(ranks: &[f64], w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let limit = (2.0 * w).round() as usize;
    let below: f64 = counts.iter().take(limit.min(total) + 1).sum();
    below / 2f64.powi(ranks.len() as i32)
}

/// Two-sided test of `a` against `b` at level `alpha`. The verdict sign
/// follows the median of `a − b`.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], alpha: f64) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(domain(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if !(0.0..1.0).contains(&alpha) || alpha == 0.0 {
        return Err(domain("alpha must lie in (0, 1)"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(domain("samples must be finite"));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let n = nonzero.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            n: 0,
            w_plus: 0.0,
            w_minus: 0.0,
            statistic: 0.0,
            p_value: 1.0,
            method: PMethod::Degenerate,
            verdict: Verdict::Tie,
        });
    }
    if n < MIN_PAIRS {
        return Err(domain(format!(
            "need at least {MIN_PAIRS} non-zero differences, got {n}"
        )));
    }

    let magnitudes: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = average_ranks(&magnitudes);
    let w_plus: f64 = nonzero
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let w_minus: f64 = nonzero
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d < 0.0)
        .map(|(_, r)| r)
        .sum();
    let w = w_plus.min(w_minus);

    let (p, method) = if n <= EXACT_LIMIT {
        ((2.0 * exact_lower_tail(&ranks, w)).min(1.0), PMethod::Exact)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
        let z = (w - mean) / var.sqrt();
        (
            (erfc(z.abs() / std::f64::consts::SQRT_2)).min(1.0),
            PMethod::Normal,
        )
    };

    let verdict = if p >= alpha {
        Verdict::Tie
    } else {
        let m = median(&diffs);
        // a zero median with a significant test falls back to the rank sums
        let sign = if m != 0.0 { m } else { w_plus - w_minus };
        if sign > 0.0 {
            Verdict::Plus
        } else if sign < 0.0 {
            Verdict::Minus
        } else {
            Verdict::Tie
        }
    };
    Ok(WilcoxonResult {
        n,
        w_plus,
        w_minus,
        statistic: w,
        p_value: p,
        method,
        verdict,
    })
}
