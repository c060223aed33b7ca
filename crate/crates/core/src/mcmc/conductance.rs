use serde_json::{json, Value};

use super::exact::ExactChain;
use super::ChainKind;
use crate::budget::Budget;
use crate::error::Result;
use crate::graphs::{BipartiteGraph, Side};
use crate::model::{gibbs_exact, induced_edge_table, IsingParams};
use crate::numeric::Scalar;

/// Exact quantities of the majority-even bottleneck for plain Glauber.
#[derive(Clone, Debug)]
pub struct ConductanceReport<S> {
    /// `Q(S_E, S_E^c)`.
    pub q_cut: S,
    pub mu_even: S,
    pub mu_odd: S,
    pub mu_balanced: S,
    /// `Φ(S_E) = Q(S_E, S_E^c)/μ(S_E)`.
    pub phi_even: S,
    pub phi_odd: S,
    pub weight_balanced: S,
    pub weight_even: S,
    pub partition: S,
    /// `ω̃(S_bal)/(1+λ)^{n/2}`.
    pub bound_rhs: S,
    /// `Q(S_E, S_E^c) ≤ μ(S_bal)`.
    pub cut_within_balanced: bool,
    /// `Φ(S_E) ≤ ω̃(S_bal)/ω̃(S_E)`.
    pub phi_within_weight_ratio: bool,
    /// `ω̃(S_E) ≥ (1+λ)^{n/2} - 1`.
    pub weight_even_lower_bound: bool,
    /// `Φ(S_E) ≤ ω̃(S_bal)/(1+λ)^{n/2}`.
    pub phi_within_bound_rhs: bool,
}

impl<S: Scalar> ConductanceReport<S> {
    /// The smaller of the two majority-side conductances.
    pub fn phi_min(&self) -> S {
        if self.phi_odd < self.phi_even {
            self.phi_odd.clone()
        } else {
            self.phi_even.clone()
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "q_cut": self.q_cut.to_json(),
            "mu_even": self.mu_even.to_json(),
            "mu_odd": self.mu_odd.to_json(),
            "mu_balanced": self.mu_balanced.to_json(),
            "phi_even": self.phi_even.to_json(),
            "phi_odd": self.phi_odd.to_json(),
            "weight_balanced": self.weight_balanced.to_json(),
            "weight_even": self.weight_even.to_json(),
            "partition": self.partition.to_json(),
            "bound_rhs": self.bound_rhs.to_json(),
            "cut_within_balanced": self.cut_within_balanced,
            "phi_within_weight_ratio": self.phi_within_weight_ratio,
            "weight_even_lower_bound": self.weight_even_lower_bound,
            "phi_within_bound_rhs": self.phi_within_bound_rhs,
        })
    }
}

/// TV curve of one chain together with the bottleneck report.
#[derive(Clone, Debug)]
pub struct MixingReport<S> {
    pub tv_curve: Vec<(u64, S)>,
    pub conductance: ConductanceReport<S>,
}

impl<S: Scalar> MixingReport<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "tv_curve": self.tv_curve.iter().map(|(t, tv)| json!([t, tv.to_json()])).collect::<Vec<_>>(),
            "conductance": self.conductance.to_json(),
        })
    }
}

fn class_of(mask: u64, even: u64) -> std::cmp::Ordering {
    let e = (mask & even).count_ones();
    let o = (mask & !even).count_ones();
    e.cmp(&o)
}

/// Computes the conductance of the majority-side sets of plain Glauber
/// together with every quantity in the balanced-set bound.
pub fn conductance_exact<S: Scalar>(g: &BipartiteGraph, p: &IsingParams<S>, budget: &Budget) -> Result<ConductanceReport<S>> {
    use std::cmp::Ordering::*;
    let n = g.n();
    let chain = ExactChain::new(g, ChainKind::Glauber, p, None, budget)?;
    let mu = gibbs_exact(g, p, budget)?;
    let edges = induced_edge_table(g, budget)?;
    let even = g.side_mask(Side::Even).expect("mask range");

    let weight = |m: u64| p.lambda().powu(m.count_ones()) * p.q().powu(edges[m as usize] as u32);
    let mut weight_balanced = Vec::new();
    let mut weight_even = Vec::new();
    let mut weight_all = Vec::new();
    let mut cut_even = Vec::new();
    let mut cut_odd = Vec::new();
    for m in 0u64..1 << n {
        let w = weight(m);
        let class = class_of(m, even);
        match class {
            Equal => weight_balanced.push(w.clone()),
            Greater => weight_even.push(w.clone()),
            Less => {}
        }
        weight_all.push(w);
        if class != Equal {
            for v in 0..n {
                let y = m ^ 1 << v;
                if class_of(y, even) != class {
                    let flow = mu.prob_mask(m).clone() * chain.glauber_prob(m, y);
                    if class == Greater {
                        cut_even.push(flow);
                    } else {
                        cut_odd.push(flow);
                    }
                }
            }
        }
    }
    let weight_balanced = S::sum_all(weight_balanced);
    let weight_even = S::sum_all(weight_even);
    let partition = S::sum_all(weight_all);
    let q_cut = S::sum_all(cut_even);
    let q_cut_odd = S::sum_all(cut_odd);
    let mu_even = mu.mass_where(|m| class_of(m, even) == Greater);
    let mu_odd = mu.mass_where(|m| class_of(m, even) == Less);
    let mu_balanced = mu.mass_where(|m| class_of(m, even) == Equal);
    let phi_even = q_cut.clone() / mu_even.clone();
    let phi_odd = q_cut_odd / mu_odd.clone();
    let free = (S::one() + p.lambda().clone()).powu((n / 2) as u32);
    let bound_rhs = weight_balanced.clone() / free.clone();

    Ok(ConductanceReport {
        cut_within_balanced: q_cut <= mu_balanced,
        phi_within_weight_ratio: phi_even <= weight_balanced.clone() / weight_even.clone(),
        weight_even_lower_bound: weight_even >= free - S::one(),
        phi_within_bound_rhs: phi_even <= bound_rhs,
        q_cut,
        mu_even,
        mu_odd,
        mu_balanced,
        phi_even,
        phi_odd,
        weight_balanced,
        weight_even,
        partition,
        bound_rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::generate_graph;
    use crate::numeric::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn c4_balanced_weight() {
        let g = generate_graph("cycle:4").unwrap();
        for q in [r(0, 1), r(1, 3), r(1, 10)] {
            let p = IsingParams::new(r(1, 1), q.clone()).unwrap();
            let rep = conductance_exact(&g, &p, &Budget::default()).unwrap();
            assert_eq!(rep.weight_balanced, r(1, 1) + r(4, 1) * q.clone() + q.pow(4));
            assert!(rep.cut_within_balanced);
            assert!(rep.phi_within_weight_ratio);
            assert!(rep.weight_even_lower_bound);
            assert_eq!(rep.phi_even, rep.phi_odd);
        }
    }

    #[test]
    fn hypercube_conductance_decreases() {
        let b = Budget::default();
        let p = IsingParams::new(r(1, 1), r(1, 10)).unwrap();
        let phis: Vec<Rational> = ["hypercube:2", "hypercube:3"]
            .iter()
            .map(|s| conductance_exact(&generate_graph(s).unwrap(), &p, &b).unwrap().phi_even)
            .collect();
        assert!(phis[1] < phis[0]);
    }
}
