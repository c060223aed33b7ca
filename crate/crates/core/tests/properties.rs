mod common;

use common::*;
use expander_ising::cluster::{compute_L, ursell, xi_exact};
use expander_ising::graphs::{closure, count_two_linked, generate_graph, two_linked_components};
use expander_ising::mcmc::{detailed_balance_holds, exact_tv_curve, stationarity_residual, ChainKind, ExactChain};
use expander_ising::model::{
    classical_log_weight, classical_params, config_weight, gibbs_exact, partition_exact, percolation_expectation, IsingParams,
};
use expander_ising::numeric::{parse_rational, Rational};
use expander_ising::polymer::{decorated_weight, enumerate_polymers, incompatible, polymer_weight, WeightForm};
use expander_ising::sampler::{defect_side_probability, mu_hat_exact, PolymerSystem};
use expander_ising::{BipartiteGraph, Budget, Scalar, Side, VertexSet};
use proptest::prelude::*;

fn ratio(max_den: i64, max_over_den: i64, allow_zero: bool) -> impl Strategy<Value = Rational> {
    (1..=max_den).prop_flat_map(move |den| {
        let lo = if allow_zero { 0 } else { 1 };
        (lo..=max_over_den * den).prop_map(move |num| r(num, den))
    })
}

fn lambda() -> impl Strategy<Value = Rational> {
    ratio(6, 3, false)
}

fn q() -> impl Strategy<Value = Rational> {
    ratio(6, 1, true)
}

fn small_spec() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["hypercube:1", "hypercube:2", "cycle:4", "cycle:6", "hypercube:3"])
}

fn graph(spec: &str) -> BipartiteGraph {
    generate_graph(spec).unwrap()
}

fn subset(n: usize) -> impl Strategy<Value = VertexSet> {
    prop::collection::vec(any::<bool>(), n).prop_map(move |bits| VertexSet::from_vertices(n, (0..n).filter(|&i| bits[i])))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_graphs_are_regular_bipartite_and_symmetric(
        spec in prop::sample::select(vec![
            "hypercube:1", "hypercube:4", "cycle:10", "torus:4^2", "torus:6^2", "torus:4^3", "middle-layer:3",
            "middle-layer:5", "cartesian:cycle:4xcycle:6",
        ])
    ) {
        let g = graph(spec);
        for v in 0..g.n() {
            prop_assert_eq!(g.neighbors(v).len(), g.degree());
            for &u in g.neighbors(v) {
                prop_assert!(g.side_of(u) != g.side_of(v));
                prop_assert!(g.neighbors(u).contains(&v));
            }
        }
        prop_assert_eq!(g.side_size() * 2, g.n());
    }

    #[test]
    fn closure_is_monotone_and_keeps_the_neighborhood(a in subset(16), extra in subset(16), even in any::<bool>()) {
        let g = graph("hypercube:4");
        let side = if even { Side::Even } else { Side::Odd };
        let on_side = g.side_set(side);
        let small = a.intersection(&on_side);
        let big = small.union(&extra.intersection(&on_side));
        let c_small = closure(&g, &small, side).unwrap();
        let c_big = closure(&g, &big, side).unwrap();
        prop_assert!(c_small.is_subset(&c_big));
        prop_assert!(small.is_subset(&c_small));
        prop_assert_eq!(g.neighborhood(&c_small), g.neighborhood(&small));
    }

    #[test]
    fn two_linked_blocks_are_far_apart_and_connected(s in subset(16), spec in prop::sample::select(vec!["hypercube:4", "torus:4^2"])) {
        let g = graph(spec);
        for side in Side::BOTH {
            let blocks = two_linked_components(&g, &s, side);
            let union = blocks.iter().fold(VertexSet::empty(g.n()), |acc, b| acc.union(b));
            prop_assert_eq!(union, s.intersection(&g.side_set(side)));
            for (i, a) in blocks.iter().enumerate() {
                prop_assert_eq!(count_blocks(&g, a), 1);
                for b in &blocks[i + 1..] {
                    for u in a.iter() {
                        for v in b.iter() {
                            prop_assert!(!g.within_distance_two(u, v));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn percolation_identity(spec in small_spec(), l in lambda(), p_edge in q()) {
        let g = graph(spec);
        let b = Budget::default();
        let params = IsingParams::new(l.clone(), r(1, 1) - p_edge.clone()).unwrap();
        prop_assert_eq!(percolation_expectation(&g, &l, &p_edge, &b).unwrap(), partition_exact(&g, &params, &b).unwrap());
    }

    #[test]
    fn classical_weights_have_the_same_ratios(s in subset(8), t in subset(8), l in 0.05f64..4.0, beta in 0.0f64..5.0) {
        let g = graph("hypercube:3");
        let p = IsingParams::from_beta(l, beta).unwrap();
        let c = classical_params(l, beta, g.degree()).unwrap();
        let lhs = config_weight(&g, &s, &p).ln() - config_weight(&g, &t, &p).ln();
        let rhs = classical_log_weight(&g, &s, &c) - classical_log_weight(&g, &t, &c);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn hard_core_limit_is_the_independence_polynomial(spec in small_spec(), l in lambda()) {
        let g = graph(spec);
        let z = partition_exact(&g, &IsingParams::new(l.clone(), r(0, 1)).unwrap(), &Budget::default()).unwrap();
        let zero = Rational::from_u64(0);
        let mut poly = zero.clone();
        for m in 0u64..1 << g.n() {
            let s = VertexSet::from_mask(g.n(), m);
            if g.induced_edges(&s) == 0 {
                poly = poly + l.powu(s.len() as u32);
            }
        }
        prop_assert_eq!(z, poly);
    }

    #[test]
    fn gibbs_measure_is_normalized(spec in small_spec(), l in lambda(), q in q()) {
        let g = graph(spec);
        let mu = gibbs_exact(&g, &IsingParams::new(l, q).unwrap(), &Budget::default()).unwrap();
        prop_assert_eq!(mu.total(), r(1, 1));
    }

    #[test]
    fn glauber_is_reversible_and_stationary(spec in prop::sample::select(vec!["cycle:4", "hypercube:2", "cycle:6"]), l in lambda(), q in q()) {
        let g = graph(spec);
        let b = Budget::default();
        let p = IsingParams::new(l, q).unwrap();
        let mu = gibbs_exact(&g, &p, &b).unwrap();
        let chain = ExactChain::new(&g, ChainKind::Glauber, &p, None, &b).unwrap();
        prop_assert_eq!(stationarity_residual(&chain, &mu), r(0, 1));
        prop_assert!(detailed_balance_holds(&chain, &mu, &r(0, 1)));
    }

    #[test]
    fn flips_chain_is_stationary(l in lambda(), q in q()) {
        let g = graph("hypercube:2");
        let b = Budget::default();
        let p = IsingParams::new(l, q).unwrap();
        let mu = gibbs_exact(&g, &p, &b).unwrap();
        let chain = ExactChain::new(&g, ChainKind::GlauberWithFlips, &p, g.flip_automorphism(), &b).unwrap();
        prop_assert_eq!(stationarity_residual(&chain, &mu), r(0, 1));
    }

    #[test]
    fn tv_curves_do_not_increase(l in 0.1f64..3.0, q in 0.0f64..1.0, start in 0u64..256, flips in any::<bool>()) {
        let g = graph("hypercube:3");
        let b = Budget::default();
        let p = IsingParams::new(l, q).unwrap();
        let mu = gibbs_exact(&g, &p, &b).unwrap();
        let kind = if flips { ChainKind::GlauberWithFlips } else { ChainKind::Glauber };
        let chain = ExactChain::new(&g, kind, &p, g.flip_automorphism(), &b).unwrap();
        let curve = exact_tv_curve(&chain, &mu, start, 40);
        for w in curve.windows(2) {
            prop_assert!(w[1].1 <= w[0].1 + 1e-12);
        }
    }

    #[test]
    fn polymer_weights_agree_and_are_bounded(l in lambda(), q in q(), even in any::<bool>()) {
        let g = graph("hypercube:3");
        let b = Budget::default();
        let p = IsingParams::new(l.clone(), q).unwrap();
        let side = if even { Side::Even } else { Side::Odd };
        for a in enumerate_polymers(&g, side, 3) {
            let w = polymer_weight(&g, &a, &p, WeightForm::Product, &b).unwrap();
            prop_assert_eq!(w.clone(), polymer_weight(&g, &a, &p, WeightForm::Sum, &b).unwrap());
            prop_assert!(w > r(0, 1) && w <= l.powu(a.size() as u32));
            let nbhd = a.neighborhood().to_vec();
            let mut total = r(0, 1);
            for m in 0u64..1 << nbhd.len() {
                let bset = VertexSet::from_vertices(g.n(), (0..nbhd.len()).filter(|i| m >> i & 1 == 1).map(|i| nbhd[i]));
                let dp = expander_ising::polymer::DecoratedPolymer::new(a.clone(), bset).unwrap();
                total = total + decorated_weight(&g, &dp, &p);
            }
            prop_assert_eq!(total, w);
        }
    }

    #[test]
    fn ursell_agrees_with_deletion_contraction(n in 1usize..=6, bits in any::<u16>()) {
        let mut adj = vec![0u32; n];
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                if bits >> (k % 16) & 1 == 1 {
                    adj[u] |= 1 << v;
                    adj[v] |= 1 << u;
                }
                k += 1;
            }
        }
        prop_assert_eq!(ursell(&adj, &Budget::default()).unwrap(), ursell_oracle(&adj));
    }

    #[test]
    fn z_hat_identity(spec in prop::sample::select(vec!["cycle:4", "cycle:6", "hypercube:3"]), l in lambda(), q in q()) {
        let g = graph(spec);
        let b = Budget::default();
        let p = IsingParams::new(l.clone(), q).unwrap();
        let total = mu_hat_exact(&g, &p, &b).unwrap().total_weight;
        let xi = xi_exact(&g, Side::Odd, &p, &b).unwrap() + xi_exact(&g, Side::Even, &p, &b).unwrap();
        prop_assert_eq!(total, (r(1, 1) + l).powu((g.n() / 2) as u32) * xi);
    }

    #[test]
    fn single_family_expansion_is_a_log_series(l in ratio(8, 1, false), k in 1usize..=5) {
        // On Q3 every polymer is a single vertex and all four are mutually
        // incompatible, so Ξ = 1 + 4x.
        let g = graph("hypercube:3");
        let b = Budget::default();
        let p = IsingParams::new(l, r(1, 3)).unwrap();
        let sys = PolymerSystem::new(&g, Side::Even, &p, None, &b).unwrap();
        prop_assert_eq!(sys.polymers().len(), 4);
        let x = sys.weights()[0].clone();
        let mx = Rational::from_u64(4) * x;
        let trunc = compute_L(&g, Side::Even, k, &p, &b).unwrap();
        let mut series = r(0, 1);
        for j in 1..=k {
            let term = mx.powu(j as u32) / Rational::from_u64(j as u64);
            series = if j % 2 == 1 { series + term } else { series - term };
        }
        prop_assert_eq!(trunc.value, series);
    }

    #[test]
    fn defect_probability_is_a_probability(a in ratio(5, 4, true), c in ratio(5, 4, true)) {
        match defect_side_probability(&a, &c) {
            Ok(prob) => {
                prop_assert!(prob >= r(0, 1) && prob <= r(1, 1));
                prop_assert_eq!(prob, a.clone() / (a + c));
            }
            Err(_) => prop_assert!(a == r(0, 1) && c == r(0, 1)),
        }
    }

    #[test]
    fn rationals_round_trip_through_text(num in -10_000i64..10_000, den in 1i64..10_000) {
        let x = r(num, den);
        prop_assert_eq!(parse_rational(&x.to_string()).unwrap(), x);
    }
}

fn count_blocks(g: &BipartiteGraph, set: &VertexSet) -> usize {
    let side = g.side_of(set.first().unwrap());
    two_linked_components(g, set, side).len()
}

#[test]
fn compatible_polymers_have_disjoint_neighborhoods() {
    for spec in ["hypercube:3", "hypercube:4"] {
        let g = graph(spec);
        for side in Side::BOTH {
            let polys = enumerate_polymers(&g, side, 3);
            for a in &polys {
                for b in &polys {
                    let inc = incompatible(a, b).unwrap();
                    assert_eq!(inc, !a.neighborhood().is_disjoint(b.neighborhood()));
                }
            }
        }
    }
}

#[test]
fn polymer_counts_respect_the_linked_set_bound() {
    for spec in ["hypercube:3", "hypercube:4", "torus:4^2"] {
        let g = graph(spec);
        let ed2 = std::f64::consts::E * (g.degree() * g.degree()) as f64;
        for k in 1..=4 {
            let count = enumerate_polymers(&g, Side::Even, k).len() as f64;
            let bound = (g.n() / 2) as f64 * k as f64 * ed2.powi(k as i32 - 1);
            assert!(count <= bound, "{spec} k={k}: {count} > {bound}");
            for v in 0..g.n() {
                assert!(count_two_linked(&g, v, k) as f64 <= ed2.powi(k as i32 - 1));
            }
        }
    }
}
