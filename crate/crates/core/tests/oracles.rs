mod common;

use common::*;
use expander_ising::cluster::{compute_L, ursell, xi_exact};
use expander_ising::graphs::{count_two_linked, generate_graph};
use expander_ising::model::{partition_exact, IsingParams};
use expander_ising::numeric::Rational;
use expander_ising::polymer::recover_configuration;
use expander_ising::sampler::{
    fundamental_identity_check, mu_hat_exact, restricted_Z, restricted_z_by_decorations, PolymerSystem, RestrictedModel,
    ZMethod,
};
use expander_ising::{Budget, Scalar, Side, VertexSet};

#[test]
fn deletion_contraction_spot_values() {
    assert_eq!(signed_connected_count(1, &[]), 1);
    assert_eq!(signed_connected_count(2, &[]), 0);
    assert_eq!(signed_connected_count(2, &[(0, 1)]), -1);
    assert_eq!(signed_connected_count(2, &[(0, 1), (0, 1)]), -1 - 1 + 1);
    assert_eq!(signed_connected_count(3, &[(0, 1), (1, 2), (0, 2)]), 2);
    assert_eq!(signed_connected_count(1, &[(0, 0)]), 0);
}

#[test]
fn isomorph_lists_have_the_known_sizes() {
    let sizes: Vec<usize> = (1..=5).map(|n| connected_graph_classes(n).len()).collect();
    assert_eq!(sizes, vec![1, 1, 2, 6, 21]);
}

#[test]
fn ursell_matches_deletion_contraction() {
    let b = Budget::default();
    for n in 1..=5 {
        for adj in connected_graph_classes(n) {
            assert_eq!(ursell(&adj, &b).unwrap(), ursell_oracle(&adj), "{adj:?}");
        }
    }
    // A few six-vertex graphs: K6, C6 and the prism.
    let k6: Vec<u32> = (0..6).map(|v| 0b111111 & !(1 << v)).collect();
    let c6: Vec<u32> = (0..6).map(|v| 1 << ((v + 1) % 6) | 1 << ((v + 5) % 6)).collect();
    let prism: Vec<u32> = (0..6).map(|v| c6[v] | 1 << ((v + 3) % 6)).collect();
    for adj in [k6, c6, prism] {
        assert_eq!(ursell(&adj, &b).unwrap(), ursell_oracle(&adj));
    }
}

#[test]
fn two_linked_counts_match_brute_force() {
    for spec in ["hypercube:3", "hypercube:4", "torus:4^2", "cycle:8"] {
        let g = generate_graph(spec).unwrap();
        for v in 0..g.n() {
            for ell in 1..=4 {
                assert_eq!(count_two_linked(&g, v, ell), two_linked_count_oracle(&g, v, ell), "{spec} v={v} ell={ell}");
            }
        }
    }
}

#[test]
fn hard_core_counts() {
    for spec in ["cycle:4", "cycle:6", "hypercube:3", "hypercube:4", "torus:4^2"] {
        let g = generate_graph(spec).unwrap();
        let p = IsingParams::new(r(1, 1), r(0, 1)).unwrap();
        let z = partition_exact(&g, &p, &Budget::default()).unwrap();
        assert_eq!(z, Rational::from_u64(independent_set_count(&g)), "{spec}");
    }
}

#[test]
fn mu_hat_weights_match_admissibility_oracle() {
    let g = generate_graph("hypercube:3").unwrap();
    let (lambda, q) = (r(1, 1), r(3, 10));
    let p = IsingParams::new(lambda.clone(), q.clone()).unwrap();
    let report = mu_hat_exact(&g, &p, &Budget::default()).unwrap();
    let mut total = Rational::from_u64(0);
    for m in 0u64..1 << g.n() {
        let s = VertexSet::from_mask(g.n(), m);
        for side in Side::BOTH {
            let ok = admissible_on_side(&g, &s, side);
            assert_eq!(ok, recover_configuration(&g, &s, side).is_some());
            if ok {
                total = total + weight_oracle(&g, &s, &lambda, &q);
            }
        }
    }
    assert_eq!(report.total_weight, total);
}

fn identity_everywhere(spec: &str, p: &IsingParams<Rational>) -> usize {
    let g = generate_graph(spec).unwrap();
    let b = Budget::default();
    let mut checked = 0;
    for side in Side::BOTH {
        let sys = PolymerSystem::new(&g, side, p, None, &b).unwrap();
        let mut frontier = vec![(RestrictedModel::full(g.n(), side), 0usize)];
        while let Some((rm, v)) = frontier.pop() {
            if v == g.n() {
                continue;
            }
            let (lhs, rhs) = fundamental_identity_check(&g, &sys, &rm, v, p, &b).unwrap();
            assert_eq!(lhs, rhs, "{spec} {side} v={v}");
            assert_eq!(
                restricted_Z(&sys, &rm, ZMethod::Exact, &b).unwrap(),
                restricted_z_by_decorations(&g, &sys, &rm, p, &b).unwrap()
            );
            checked += 1;
            let next = rm.exclude(v);
            for i in rm.members(&sys) {
                if sys.polymers()[i].vertices().contains(v) {
                    for (dp, _) in sys.decorations(&g, i, p, &b).unwrap() {
                        frontier.push((next.anchor(dp), v + 1));
                    }
                }
            }
            frontier.push((next, v + 1));
        }
    }
    checked
}

#[test]
fn fundamental_identity_on_every_reachable_node() {
    let p = IsingParams::new(r(1, 1), r(3, 10)).unwrap();
    assert!(identity_everywhere("hypercube:3", &p) > 8);
    assert!(identity_everywhere("cycle:6", &p) > 6);
    let hard_core = IsingParams::new(r(2, 3), r(0, 1)).unwrap();
    identity_everywhere("cycle:8", &hard_core);
}

#[test]
fn z_hat_identity_on_small_graphs() {
    let b = Budget::default();
    for spec in ["cycle:4", "cycle:6", "cycle:8", "hypercube:3", "torus:4^2"] {
        let g = generate_graph(spec).unwrap();
        for (l, q) in [(r(1, 1), r(3, 10)), (r(1, 5), r(1, 5)), (r(5, 2), r(0, 1))] {
            let p = IsingParams::new(l.clone(), q).unwrap();
            let total = mu_hat_exact(&g, &p, &b).unwrap().total_weight;
            let free = (r(1, 1) + l).powu((g.n() / 2) as u32);
            let xi = xi_exact(&g, Side::Odd, &p, &b).unwrap() + xi_exact(&g, Side::Even, &p, &b).unwrap();
            assert_eq!(total, free * xi, "{spec}");
        }
    }
}

#[test]
fn cluster_terms_decay_on_q3() {
    let g = generate_graph("hypercube:3").unwrap();
    let p = IsingParams::new(r(1, 5), r(1, 5)).unwrap();
    let l = compute_L(&g, Side::Even, 6, &p, &Budget::default()).unwrap();
    let mags: Vec<f64> = l.per_size.iter().map(|(_, x)| x.as_f64().abs()).collect();
    assert!(mags.windows(2).all(|w| w[1] < w[0]), "{mags:?}");
}
