use proptest::prelude::*;

use maeo::benchmarks::lcoe_from_costs;
use maeo::benchmarks::LcoeParameters;
use maeo::diagnostics::{eigenvalue_magnitudes, mobility_matrix};
use maeo::harness::wilcoxon_signed_rank;
use maeo::indicators::{hv_exact, FrontSet};
use maeo::pareto::{annotate, dominates_objectives, sort_fronts};
use maeo::problem::{DecisionVector, Individual};

fn bare(objectives: Vec<f64>) -> Individual {
    Individual {
        decision: DecisionVector::new(vec![0.0]),
        raw_objectives: objectives.clone(),
        objectives,
        constraints: vec![],
        violations: vec![],
        rank: 0,
        cd: 0.0,
        rd: 0.0,
        score: 0.0,
    }
}

/// Points on a coarse grid so that ties and dominance both occur often.
fn grid_points(max_len: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(
        prop::collection::vec((0u8..6).prop_map(f64::from), dim),
        1..max_len,
    )
}

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0u8..4).prop_map(f64::from), 3)
}

fn brute_force_ranks(points: &[Vec<f64>]) -> Vec<usize> {
    let mut rank = vec![0; points.len()];
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut r = 1;
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| {
                !remaining
                    .iter()
                    .any(|&j| dominates_objectives(&points[j], &points[i]))
            })
            .collect();
        for &i in &front {
            rank[i] = r;
        }
        remaining.retain(|i| !front.contains(i));
        r += 1;
    }
    rank
}

proptest! {
    #[test]
    fn dominance_is_a_strict_partial_order(a in vec3(), b in vec3(), c in vec3()) {
        prop_assert!(!dominates_objectives(&a, &a));
        prop_assert!(!(dominates_objectives(&a, &b) && dominates_objectives(&b, &a)));
        if dominates_objectives(&a, &b) && dominates_objectives(&b, &c) {
            prop_assert!(dominates_objectives(&a, &c));
        }
    }

    #[test]
    fn sorting_matches_brute_force(points in grid_points(50, 3)) {
        let fronts = sort_fronts(&points);
        let want = brute_force_ranks(&points);
        let mut got = vec![0; points.len()];
        for (r, front) in fronts.iter().enumerate() {
            for &i in front {
                got[i] = r + 1;
            }
        }
        prop_assert_eq!(got, want);
    }

    #[test]
    fn annotations_stay_in_range_and_ranks_separate(points in grid_points(40, 3)) {
        let ranked = annotate(points.into_iter().map(bare).collect()).unwrap();
        for ind in &ranked.individuals {
            prop_assert!((0.0..=1.0).contains(&ind.cd));
            prop_assert!((0.0..=1.0).contains(&ind.rd));
        }
        for r in 1..ranked.fronts.len() {
            let worst_upper = ranked.fronts[r - 1].iter().map(|&i| ranked.individuals[i].score).fold(f64::INFINITY, f64::min);
            let best_lower = ranked.fronts[r].iter().map(|&i| ranked.individuals[i].score).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(worst_upper > best_lower);
        }
    }

    #[test]
    fn hypervolume_ignores_point_and_axis_order(
        raw in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 1..25),
        shift in 0usize..25,
        axes in Just([0usize, 1, 2]).prop_shuffle(),
    ) {
        let reference = [1.2, 1.1, 1.3];
        let base = hv_exact(&FrontSet::new(&raw, &reference).unwrap());
        let mut rotated = raw.clone();
        let len = rotated.len();
        rotated.rotate_left(shift % len);
        rotated.reverse();
        let reordered = hv_exact(&FrontSet::new(&rotated, &reference).unwrap());
        let permuted: Vec<Vec<f64>> = raw.iter().map(|p| axes.iter().map(|&a| p[a]).collect()).collect();
        let permuted_ref: Vec<f64> = axes.iter().map(|&a| reference[a]).collect();
        let swapped = hv_exact(&FrontSet::new(&permuted, &permuted_ref).unwrap());
        prop_assert!((base - reordered).abs() <= 1e-12 * base.max(1.0));
        prop_assert!((base - swapped).abs() <= 1e-12 * base.max(1.0));
    }

    #[test]
    fn lcoe_is_monotone_in_burnup_and_cost(
        burnups in prop::collection::vec(20.0f64..80.0, 7),
        costs in prop::collection::vec(prop::collection::vec(100.0f64..3000.0, 3), 7),
        cycle_days in 300.0f64..900.0,
        which in 0usize..7,
        component in 0usize..3,
        bump in 0.01f64..0.5,
    ) {
        let params = LcoeParameters::default();
        let base = lcoe_from_costs(cycle_days, &burnups, &costs, &params).unwrap().lcoe;
        let mut more_burnup = burnups.clone();
        more_burnup[which] *= 1.0 + bump;
        prop_assert!(lcoe_from_costs(cycle_days, &more_burnup, &costs, &params).unwrap().lcoe < base);
        let mut more_cost = costs.clone();
        more_cost[which][component] *= 1.0 + bump;
        prop_assert!(lcoe_from_costs(cycle_days, &burnups, &more_cost, &params).unwrap().lcoe > base);
    }

    #[test]
    fn mobility_is_column_stochastic(
        raw in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0usize..40), 2..10),
    ) {
        let total: f64 = raw.iter().map(|r| r.0).sum::<f64>() + 1e-9;
        let p: Vec<f64> = raw.iter().map(|r| (r.0 + 1e-9 / raw.len() as f64) / total).collect();
        let h: Vec<f64> = raw.iter().map(|r| r.1).collect();
        let sizes: Vec<usize> = raw.iter().map(|r| r.2).collect();
        let islands: Vec<usize> = (0..raw.len()).collect();
        let m = mobility_matrix(0, &islands, &p, &h, &sizes);
        prop_assert!(m.check_stochastic(1e-12).is_ok());
        prop_assert!((eigenvalue_magnitudes(&m)[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn wilcoxon_is_antisymmetric(
        pairs in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 6..40),
    ) {
        let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let ab = wilcoxon_signed_rank(&a, &b, 0.05).unwrap();
        let ba = wilcoxon_signed_rank(&b, &a, 0.05).unwrap();
        prop_assert_eq!(ab.w_plus, ba.w_minus);
        prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
        prop_assert_eq!(ab.verdict, ba.verdict.flipped());
    }
}
