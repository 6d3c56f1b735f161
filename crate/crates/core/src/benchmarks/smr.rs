//! Small modular reactor equilibrium-cycle loading problem.
//!
//! Decision: enrichment of the seven assembly types (A01, A02, B01, B02,
//! C01, C02, C03), each on a 0.02 wt% grid within ±0.4 wt% of its nominal
//! value, plus the burnable-absorber placement. Objectives: fuel-cycle
//! LCOE (min), maximum soluble boron (min) and EFPY (max, negated).
//! Constraints: F_q ≤ 2.49 and FΔH ≤ 1.5.
//!
//! The core response comes from [`SurrogateCore`], a synthetic analytic
//! model standing in for a nodal simulator. It is NOT a physics model: it
//! only reproduces the structure that matters to the optimizer (objective
//! conflict, active constraints) and is calibrated so that the reference
//! loading reproduces the simulator's reference results exactly.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::problem::{ConstraintSpec, Problem, RawEvaluation, VariableSpec};

pub const ASSEMBLY_TYPES: [&str; 7] = ["A01", "A02", "B01", "B02", "C01", "C02", "C03"];
/// Nominal enrichments in wt% U-235.
pub const NOMINAL_ENRICHMENT: [f64; 7] = [1.5, 1.6, 2.5, 2.6, 4.05, 4.55, 2.6];
/// Assembly counts per type (37 in the core).
pub const ASSEMBLY_COUNTS: [f64; 7] = [8.0, 4.0, 8.0, 4.0, 8.0, 4.0, 1.0];
pub const ENRICHMENT_STEP: f64 = 0.02;
pub const ENRICHMENT_HALF_RANGE: f64 = 0.4;
pub const LEVELS_PER_TYPE: usize = 41;

pub const FQ_LIMIT: f64 = 2.49;
pub const FDH_LIMIT: f64 = 1.5;

/// Values the surrogate reproduces for the reference loading.
pub mod reference {
    pub const FQ: f64 = 2.293;
    pub const FDH: f64 = 1.570;
    pub const MAX_BORON: f64 = 1265.2;
    pub const EFPY: f64 = 4.9114;
    pub const LCOE: f64 = 14.6349;
}

const C_CLASS: [usize; 3] = [4, 5, 6];
const AB_CLASS: [usize; 4] = [0, 1, 2, 3];
const C01: usize = 4;
const C02: usize = 5;

/// lb of U3O8 per kg of uranium.
const LB_U3O8_PER_KG_U: f64 = 2.204_622_621_8 * 842.082 / (3.0 * 238.028_91);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaPlacement {
    None = 0,
    C01 = 1,
    Split = 2,
    C02 = 3,
}

impl BaPlacement {
    pub const ALL: [BaPlacement; 4] = [Self::None, Self::C01, Self::Split, Self::C02];

    pub fn from_gene(g: f64) -> Result<Self> {
        let k = g.round();
        if !(0.0..=3.0).contains(&k) || (g - k).abs() > 1e-9 {
            return Err(domain(format!("invalid BA gene {g}")));
        }
        Ok(Self::ALL[k as usize])
    }
}

/// Enrichment levels for assembly type `i`, ascending.
pub fn enrichment_levels(i: usize) -> Vec<f64> {
    let base = (NOMINAL_ENRICHMENT[i] * 100.0).round() as i64 - 40;
    (0..LEVELS_PER_TYPE as i64)
        .map(|k| (base + 2 * k) as f64 / 100.0)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmrDesign {
    pub enrichments: [f64; 7],
    pub ba: BaPlacement,
}

impl SmrDesign {
    /// Nominal enrichments with absorber in C02.
    pub fn reference() -> Self {
        Self {
            enrichments: NOMINAL_ENRICHMENT,
            ba: BaPlacement::C02,
        }
    }

    pub fn from_genes(genes: &[f64]) -> Result<Self> {
        if genes.len() != 8 {
            return Err(domain(format!(
                "SMR design needs 8 genes, got {}",
                genes.len()
            )));
        }
        let mut enrichments = [0.0; 7];
        for (i, e) in enrichments.iter_mut().enumerate() {
            let levels = enrichment_levels(i);
            if !levels.contains(&genes[i]) {
                return Err(domain(format!(
                    "enrichment {} of {} is not on its grid",
                    genes[i], ASSEMBLY_TYPES[i]
                )));
            }
            *e = genes[i];
        }
        Ok(Self {
            enrichments,
            ba: BaPlacement::from_gene(genes[7])?,
        })
    }

    pub fn to_genes(&self) -> Vec<f64> {
        let mut g = self.enrichments.to_vec();
        g.push(self.ba as usize as f64);
        g
    }

    /// Core-averaged enrichment.
    pub fn mean_enrichment(&self) -> f64 {
        weighted_mean(&self.enrichments, &[0, 1, 2, 3, 4, 5, 6])
    }

    /// C-class mean enrichment minus A/B-class mean enrichment.
    pub fn contrast(&self) -> f64 {
        weighted_mean(&self.enrichments, &C_CLASS) - weighted_mean(&self.enrichments, &AB_CLASS)
    }
}

fn weighted_mean(e: &[f64; 7], idx: &[usize]) -> f64 {
    let w: f64 = idx.iter().map(|&i| ASSEMBLY_COUNTS[i]).sum();
    idx.iter().map(|&i| ASSEMBLY_COUNTS[i] * e[i]).sum::<f64>() / w
}

/// How front-end fuel costs are priced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeedPricing {
    /// U3O8 purchase, conversion and enrichment as separate components.
    Components,
    /// Enriched feed bought as UF6, plus enrichment.
    Uf6,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LcoeParameters {
    /// kg of heavy metal in the core.
    pub core_mass: f64,
    /// Fabrication lead time applied to every front-end cost, years.
    pub t_fabric: f64,
    /// WABA rod cost; only used for first-cycle loadings, kept for reference.
    pub c_waba: f64,
    pub efficiency: f64,
    pub k_av: f64,
    /// Forced and maintenance outage times, years.
    pub t_fo: f64,
    pub t_mo: f64,
    pub discount_rate: f64,
    pub c_waste: f64,
    pub n_batches: f64,
    /// Core fraction of each assembly type.
    pub fractions: Vec<f64>,
    /// $/lb U3O8.
    pub u3o8_price: f64,
    /// $/kgU.
    pub conversion_price: f64,
    /// $/kgU.
    pub uf6_price: f64,
    /// $/SWU.
    pub swu_price: f64,
    /// wt% U-235.
    pub feed_assay: f64,
    pub tail_assay: f64,
    pub pricing: FeedPricing,
}

impl Default for LcoeParameters {
    fn default() -> Self {
        Self {
            core_mass: 9700.0,
            t_fabric: 1.0,
            c_waba: 1500.0,
            efficiency: 0.33,
            k_av: 0.9,
            t_fo: 30.0 / 365.0,
            t_mo: 20.0 / 365.0,
            discount_rate: 0.045,
            c_waste: 0.001,
            n_batches: 3.0,
            fractions: ASSEMBLY_COUNTS.iter().map(|c| c / 37.0).collect(),
            u3o8_price: 63.45,
            conversion_price: 80.0,
            uf6_price: 251.25,
            swu_price: 185.0,
            feed_assay: 0.711,
            tail_assay: 0.25,
            pricing: FeedPricing::Components,
        }
    }
}

impl LcoeParameters {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.core_mass,
            self.t_fabric,
            self.efficiency,
            self.k_av,
            self.discount_rate,
            self.n_batches,
            self.u3o8_price,
            self.conversion_price,
            self.uf6_price,
            self.swu_price,
            self.feed_assay,
            self.tail_assay,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(domain("LCOE parameters must be positive"));
        }
        if self.t_fo < 0.0 || self.t_mo < 0.0 || self.c_waste < 0.0 || self.c_waba < 0.0 {
            return Err(domain(
                "LCOE outage times and waste cost must be non-negative",
            ));
        }
        if self.fractions.is_empty() || self.fractions.iter().any(|a| !(*a > 0.0)) {
            return Err(domain("assembly fractions must be positive"));
        }
        if (self.fractions.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(domain("assembly fractions must sum to 1"));
        }
        if self.tail_assay >= self.feed_assay {
            return Err(domain("tail assay must be below feed assay"));
        }
        Ok(())
    }
}

/// Separative potential `V(x) = (2x - 1) ln(x / (1 - x))`, `x` a fraction.
pub fn value_function(x: f64) -> f64 {
    (2.0 * x - 1.0) * (x / (1.0 - x)).ln()
}

/// Feed mass and separative work per kg of product at `product` wt%.
pub fn enrichment_requirements(product: f64, params: &LcoeParameters) -> Result<(f64, f64)> {
    let (xp, xf, xt) = (
        product / 100.0,
        params.feed_assay / 100.0,
        params.tail_assay / 100.0,
    );
    if !(xp > xf && xp < 1.0) {
        return Err(domain(format!(
            "product assay {product} wt% must exceed feed assay"
        )));
    }
    let feed = (xp - xt) / (xf - xt);
    let tails = feed - 1.0;
    let swu = value_function(xp) + tails * value_function(xt) - feed * value_function(xf);
    Ok((feed, swu))
}

/// Undiscounted front-end costs per kgU of fuel at `enrichment` wt%.
pub fn front_end_costs(enrichment: f64, params: &LcoeParameters) -> Result<Vec<f64>> {
    let (feed, swu) = enrichment_requirements(enrichment, params)?;
    Ok(match params.pricing {
        FeedPricing::Components => vec![
            feed * LB_U3O8_PER_KG_U * params.u3o8_price,
            feed * params.conversion_price,
            swu * params.swu_price,
        ],
        FeedPricing::Uf6 => vec![feed * params.uf6_price, swu * params.swu_price],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LcoeBreakdown {
    pub lcoe: f64,
    pub efpy: f64,
    /// Capacity factor K_f.
    pub capacity_factor: f64,
    /// Levelization period T_lev in years.
    pub levelization_years: f64,
    /// `Σ_i α_i / Bu_i Σ_k C_ik` with discounted C_ik.
    pub fuel_term: f64,
}

/// LCOE from per-type component costs `costs[i][k]` (undiscounted, $/kgU)
/// and discharge burnups `burnups[i]` (MWd/kgU).
pub fn lcoe_from_costs(
    cycle_days: f64,
    burnups: &[f64],
    costs: &[Vec<f64>],
    params: &LcoeParameters,
) -> Result<LcoeBreakdown> {
    if !(cycle_days.is_finite() && cycle_days > 0.0) {
        return Err(domain(format!(
            "cycle length must be positive, got {cycle_days}"
        )));
    }
    if burnups.len() != params.fractions.len() || costs.len() != burnups.len() {
        return Err(domain(
            "burnups and costs must have one entry per assembly type",
        ));
    }
    if let Some(b) = burnups.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
        return Err(domain(format!("burnup must be positive, got {b}")));
    }
    let t_lev = cycle_days * params.n_batches / 365.25;
    let k_f = params.k_av * (1.0 - (params.t_fo + params.t_mo) / t_lev);
    if !(k_f > 0.0) {
        return Err(domain(format!("cycle too short: capacity factor {k_f}")));
    }
    let efpy = k_f * t_lev;
    let discount = (-params.discount_rate * params.t_fabric).exp();
    let fuel_term: f64 = params
        .fractions
        .iter()
        .zip(burnups)
        .zip(costs)
        .map(|((a, bu), c)| a / bu * c.iter().map(|cik| cik * discount).sum::<f64>())
        .sum();
    let r = params.discount_rate;
    let lcoe =
        efpy / (params.efficiency * k_f * 24.0) * (r / (1.0 - (-r * t_lev).exp())) * fuel_term
            + params.c_waste;
    Ok(LcoeBreakdown {
        lcoe,
        efpy,
        capacity_factor: k_f,
        levelization_years: t_lev,
        fuel_term,
    })
}

/// LCOE with component costs derived from enrichments.
pub fn lcoe(
    cycle_days: f64,
    burnups: &[f64],
    enrichments: &[f64],
    params: &LcoeParameters,
) -> Result<LcoeBreakdown> {
    let costs = enrichments
        .iter()
        .map(|&e| front_end_costs(e, params))
        .collect::<Result<Vec<_>>>()?;
    lcoe_from_costs(cycle_days, burnups, &costs, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoreResponse {
    pub cycle_days: f64,
    pub burnups: [f64; 7],
    pub max_boron: f64,
    pub fq: f64,
    pub fdh: f64,
}

// Absorber placement effects, relative to absorber in C02:
// cycle-length factor, boron shift (ppm), F_q shift, FΔH shift.
const BA_CYCLE: [f64; 4] = [1.000, 0.994, 0.996, 0.995];
const BA_BORON: [f64; 4] = [310.0, -12.0, 15.0, 0.0];
const BA_FQ: [f64; 4] = [0.21, 0.07, 0.035, 0.0];
const BA_FDH: [f64; 4] = [0.11, 0.045, 0.02, 0.0];

/// Synthetic analytic core response (non-physical surrogate).
///
/// With `x = ē / ē₀` the core-mean enrichment relative to nominal and
/// `Δc` the change in C-class vs A/B-class contrast:
///
/// * `T_cy = T_ref · x^0.9 · ba_cycle`
/// * `Bu_i = κ · (T_cy / T_ref) · sqrt(e_i / ē)`
/// * `boron = 1265.2 · x^1.6 + ba_boron`
/// * `F_q = 2.293 + 0.15 Δc + 0.05 Δc² + 0.30 Δe_C02 + 0.08 Δe_C01 + ba_fq`
/// * `FΔH = 1.570 + 0.10 Δc + 0.03 Δc² + 0.25 Δe_C02 + 0.06 Δe_C01 + ba_fdh`
///
/// `T_ref` is back-solved from the reference EFPY and `κ` from the
/// reference LCOE.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateCore {
    params: LcoeParameters,
    t_ref: f64,
    kappa: f64,
    mean_ref: f64,
    contrast_ref: f64,
}

impl SurrogateCore {
    pub fn new(params: LcoeParameters) -> Result<Self> {
        params.validate()?;
        if params.fractions.len() != 7 {
            return Err(domain("SMR core has 7 assembly types"));
        }
        let nominal = SmrDesign::reference();
        // EFPY = K_av (T_lev - T_FO - T_MO)
        let t_lev = reference::EFPY / params.k_av + params.t_fo + params.t_mo;
        let t_ref = t_lev * 365.25 / params.n_batches;
        let mut core = Self {
            params,
            t_ref,
            kappa: 1.0,
            mean_ref: nominal.mean_enrichment(),
            contrast_ref: nominal.contrast(),
        };
        let unit = core.respond(&nominal);
        let at_unit = lcoe(
            unit.cycle_days,
            &unit.burnups,
            &nominal.enrichments,
            &core.params,
        )?;
        // LCOE - C_waste scales as 1/κ
        core.kappa = (at_unit.lcoe - core.params.c_waste) / (reference::LCOE - core.params.c_waste);
        Ok(core)
    }

    pub fn params(&self) -> &LcoeParameters {
        &self.params
    }

    pub fn respond(&self, d: &SmrDesign) -> CoreResponse {
        let mean = d.mean_enrichment();
        let x = mean / self.mean_ref;
        let b = d.ba as usize;
        let c = BaPlacement::C02 as usize;
        let tau = x.powf(0.9) * BA_CYCLE[b] / BA_CYCLE[c];
        let cycle_days = self.t_ref * tau;
        let mut burnups = [0.0; 7];
        for (bu, e) in burnups.iter_mut().zip(&d.enrichments) {
            *bu = self.kappa * tau * (e / mean).sqrt();
        }
        let dc = d.contrast() - self.contrast_ref;
        let d02 = d.enrichments[C02] - NOMINAL_ENRICHMENT[C02];
        let d01 = d.enrichments[C01] - NOMINAL_ENRICHMENT[C01];
        CoreResponse {
            cycle_days,
            burnups,
            max_boron: reference::MAX_BORON * x.powf(1.6) + BA_BORON[b],
            fq: reference::FQ + 0.15 * dc + 0.05 * dc * dc + 0.30 * d02 + 0.08 * d01 + BA_FQ[b],
            fdh: reference::FDH + 0.10 * dc + 0.03 * dc * dc + 0.25 * d02 + 0.06 * d01 + BA_FDH[b],
        }
    }

    /// Raw objectives `[LCOE, max boron, -EFPY]` and constraints `[F_q, FΔH]`.
    pub fn evaluate(&self, d: &SmrDesign) -> Result<(CoreResponse, LcoeBreakdown)> {
        let resp = self.respond(d);
        let l = lcoe(resp.cycle_days, &resp.burnups, &d.enrichments, &self.params)?;
        Ok((resp, l))
    }
}

pub fn make_smr_problem(params: LcoeParameters) -> Result<Problem> {
    let core = SurrogateCore::new(params)?;
    let mut vars = (0..7)
        .map(|i| {
            VariableSpec::discrete(
                format!("enrichment_{}", ASSEMBLY_TYPES[i]),
                enrichment_levels(i),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    vars.push(VariableSpec::discrete(
        "ba_placement",
        vec![0.0, 1.0, 2.0, 3.0],
    )?);
    let constraints = vec![
        ConstraintSpec::at_most("fq", FQ_LIMIT),
        ConstraintSpec::at_most("fdh", FDH_LIMIT),
    ];
    Problem::new("smr-eq-cycle", vars, 3, constraints, move |g: &[f64]| {
        let d = SmrDesign::from_genes(g).map_err(|e| e.to_string())?;
        let (resp, l) = core.evaluate(&d).map_err(|e| e.to_string())?;
        Ok(RawEvaluation {
            objectives: vec![l.lcoe, resp.max_boron, -l.efpy],
            constraints: vec![resp.fq, resp.fdh],
        })
    })
}
