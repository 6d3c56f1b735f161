//! Migration diagnostics: the one-cycle mobility matrix of exported
//! individuals, its speed indicators θ and φ, and per-cycle statistics.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{domain, Result};

/// `m[j][i]`: probability that an individual exported by island `i` lands
/// on island `j`. Rows and columns index the active islands listed in
/// `islands`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobilityMatrix {
    pub cycle: usize,
    pub islands: Vec<usize>,
    pub m: Vec<Vec<f64>>,
}

impl MobilityMatrix {
    pub fn size(&self) -> usize {
        self.m.len()
    }

    pub fn trace(&self) -> f64 {
        (0..self.size()).map(|i| self.m[i][i]).sum()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.size())
            .map(|i| self.m.iter().map(|row| row[i]).sum())
            .collect()
    }

    pub fn check_stochastic(&self, tol: f64) -> Result<()> {
        let n = self.size();
        if n == 0 || self.m.iter().any(|row| row.len() != n) {
            return Err(domain("mobility matrix must be square and non-empty"));
        }
        if self
            .m
            .iter()
            .flatten()
            .any(|&v| !(-tol..=1.0 + tol).contains(&v))
        {
            return Err(domain("mobility matrix entries must lie in [0, 1]"));
        }
        if self.column_sums().iter().any(|s| (s - 1.0).abs() > tol) {
            return Err(domain("mobility matrix columns must sum to 1"));
        }
        Ok(())
    }
}

/// `Σ_{k=0}^{n} C(n,k) h^k (1-h)^{n-k}`, summed term by term in log space.
pub fn binomial_mass(n: u64, h: f64) -> f64 {
    if h <= 0.0 || h >= 1.0 {
        // only the k = 0 (h = 0) or k = n (h = 1) term survives
        return 1.0;
    }
    let (lh, lq) = (h.ln(), (1.0 - h).ln());
    (0..=n)
        .map(|k| (ln_binomial(n, k) + k as f64 * lh + (n - k) as f64 * lq).exp())
        .sum()
}

/// Builds the mobility matrix from destination probabilities `p`, export
/// probabilities `h` and population sizes `sizes` of the active islands:
/// `M[j][i] = δ_ij + (p_j − δ_ij) B_i`, where `B_i` is the full binomial
/// mass; columns of empty islands are uniform.
///
/// Because the printed sum runs over every export count, `B_i = 1` and each
/// occupied column reduces to `p`. The sum is kept explicit so a truncated
/// form can replace [`binomial_mass`] without touching callers.
pub fn mobility_matrix(
    cycle: usize,
    islands: &[usize],
    p: &[f64],
    h: &[f64],
    sizes: &[usize],
) -> MobilityMatrix {
    let n = p.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        if sizes[i] == 0 {
            for row in m.iter_mut() {
                row[i] = 1.0 / n as f64;
            }
            continue;
        }
        let b = binomial_mass(sizes[i] as u64, h[i]);
        for (j, row) in m.iter_mut().enumerate() {
            let delta = if i == j { 1.0 } else { 0.0 };
            row[i] = delta + (p[j] - delta) * b;
        }
    }
    MobilityMatrix {
        cycle,
        islands: islands.to_vec(),
        m,
    }
}

/// Eigenvalue magnitudes, descending.
pub fn eigenvalue_magnitudes(mm: &MobilityMatrix) -> Vec<f64> {
    let n = mm.size();
    let a = DMatrix::from_fn(n, n, |r, c| mm.m[r][c]);
    let mut mags: Vec<f64> = a.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    mags
}

/// Magnitudes below this are treated as zero when ranking λ₂.
pub const EIGEN_TOL: f64 = 1e-9;

/// Short-term speed `θ = 1 / |λ₂|`; `+∞` when λ₂ vanishes, NaN for a
/// single island.
pub fn theta(mm: &MobilityMatrix) -> Result<f64> {
    mm.check_stochastic(1e-9)?;
    if mm.size() < 2 {
        return Ok(f64::NAN);
    }
    let l2 = eigenvalue_magnitudes(mm)[1];
    Ok(if l2 < EIGEN_TOL {
        f64::INFINITY
    } else {
        1.0 / l2
    })
}

/// Trace mobility `φ = (I − tr M) / (I − 1)`; NaN for a single island.
pub fn phi(mm: &MobilityMatrix) -> f64 {
    let n = mm.size();
    if n < 2 {
        return f64::NAN;
    }
    (n as f64 - mm.trace()) / (n as f64 - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Migration,
    Solo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IslandCycleStats {
    pub index: usize,
    pub id: String,
    pub active: bool,
    /// `None` once the island has been disabled.
    pub hv: Option<f64>,
    /// Population size after this cycle's migration.
    pub population: usize,
    pub feasible: usize,
    /// Normalized HV and export probability; `None` outside migration.
    pub g: Option<f64>,
    pub h: Option<f64>,
    pub exported: usize,
    pub received: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleStats {
    pub cycle: usize,
    pub phase: Phase,
    pub q: f64,
    pub alpha: f64,
    pub reference_point: Vec<f64>,
    pub islands: Vec<IslandCycleStats>,
    pub mobility: Option<MobilityMatrix>,
    pub theta: f64,
    pub phi: f64,
    /// HV of the all-time feasible archive against this cycle's reference.
    pub combined_hv: f64,
    pub archive_size: usize,
    pub evaluations: usize,
}

impl CycleStats {
    pub fn total_population(&self) -> usize {
        self.islands.iter().map(|i| i.population).sum()
    }

    pub fn active_islands(&self) -> usize {
        self.islands.iter().filter(|i| i.active).count()
    }
}
