//! Polymers and decorated polymers on one side of the bipartition.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::budget::Budget;
use crate::error::{check_budget, Error, Result};
use crate::graphs::{closure, for_each_connected_set, two_linked_components, BipartiteGraph, Side, VertexSet};
use crate::model::IsingParams;
use crate::numeric::Scalar;

/// A 2-linked subset of one side whose closure covers at most 3/4 of it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Polymer {
    // Field order gives the canonical ordering: by side, then size, then members.
    side: Side,
    size: usize,
    a: VertexSet,
    closure_size: usize,
    neighborhood: VertexSet,
}

impl Polymer {
    /// Validates linkage, side membership and the closure constraint.
    pub fn new(g: &BipartiteGraph, a: VertexSet, side: Side) -> Result<Self> {
        if a.is_empty() || !crate::graphs::is_two_linked(g, &a) {
            return Err(Error::InvalidParams(format!("{a:?} is not a 2-linked set")));
        }
        let closure_size = closure(g, &a, side)?.len();
        if !closure_fits(closure_size, g.side_size()) {
            return Err(Error::InvalidParams(format!(
                "closure of {a:?} has {closure_size} vertices, more than 3/4 of the side"
            )));
        }
        Ok(Polymer {
            side,
            size: a.len(),
            neighborhood: g.neighborhood(&a),
            a,
            closure_size,
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.a
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn closure_size(&self) -> usize {
        self.closure_size
    }

    pub fn neighborhood(&self) -> &VertexSet {
        &self.neighborhood
    }
}

fn closure_fits(closure_size: usize, side_size: usize) -> bool {
    4 * closure_size <= 3 * side_size
}

/// All polymers on `side` with at most `k` vertices, in canonical order.
pub fn enumerate_polymers(g: &BipartiteGraph, side: Side, k: usize) -> Vec<Polymer> {
    let roots = g.side_vertices(side);
    let mut polymers: Vec<Polymer> = roots
        .par_iter()
        .flat_map_iter(|&root| {
            let mut found = Vec::new();
            for_each_connected_set(g.n(), |u| g.square_neighbors(u), root, k, true, |set| {
                let a = VertexSet::from_vertices(g.n(), set.iter().copied());
                let closure_size = closure(g, &a, side).expect("connected sets stay on one side").len();
                if closure_fits(closure_size, g.side_size()) {
                    found.push(Polymer {
                        side,
                        size: a.len(),
                        neighborhood: g.neighborhood(&a),
                        a,
                        closure_size,
                    });
                }
                true
            });
            found
        })
        .collect();
    polymers.sort();
    polymers
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightForm {
    /// `λ^{|A|} Π_{u∈N(A)} (1 + λ q^{d_A(u)})/(1+λ)`.
    Product,
    /// The literal sum over all `B ⊆ N(A)`.
    Sum,
}

/// `ω(A) = Σ_{B⊆N(A)} λ^{|A|+|B|} q^{|E(A,B)|}/(1+λ)^{|N(A)|}`.
pub fn polymer_weight<S: Scalar>(g: &BipartiteGraph, a: &Polymer, p: &IsingParams<S>, form: WeightForm, budget: &Budget) -> Result<S> {
    let lambda = p.lambda();
    let one_plus = S::one() + lambda.clone();
    match form {
        WeightForm::Product => {
            let mut w = lambda.powu(a.size as u32);
            for u in a.neighborhood.iter() {
                let d_a = g.neighbors(u).iter().filter(|&&v| a.a.contains(v)).count();
                w = w * (S::one() + lambda.clone() * p.q().powu(d_a as u32)) / one_plus.clone();
            }
            Ok(w)
        }
        WeightForm::Sum => {
            let nbhd = a.neighborhood.to_vec();
            check_budget("polymer neighborhood for the sum form", nbhd.len() as u64, budget.sum_form_neighbors as u64)?;
            let into_a: Vec<usize> = nbhd
                .iter()
                .map(|&u| g.neighbors(u).iter().filter(|&&v| a.a.contains(v)).count())
                .collect();
            let terms = (0u64..1 << nbhd.len()).map(|mask| {
                let b = mask.count_ones();
                let e: usize = (0..nbhd.len()).filter(|i| mask >> i & 1 == 1).map(|i| into_a[i]).sum();
                lambda.powu(a.size as u32 + b) * p.q().powu(e as u32)
            });
            Ok(S::sum_all(terms) / one_plus.powu(nbhd.len() as u32))
        }
    }
}

/// A polymer together with a subset of its neighborhood.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DecoratedPolymer {
    pub polymer: Polymer,
    pub b: VertexSet,
}

impl DecoratedPolymer {
    pub fn new(polymer: Polymer, b: VertexSet) -> Result<Self> {
        if !b.is_subset(polymer.neighborhood()) {
            return Err(Error::InvalidParams(format!("{b:?} is not inside N({:?})", polymer.vertices())));
        }
        Ok(DecoratedPolymer { polymer, b })
    }

    /// `A ∪ B`.
    pub fn support(&self) -> VertexSet {
        self.polymer.a.union(&self.b)
    }
}

/// `ω(A,B) = λ^{|A|+|B|} q^{|E(A,B)|}/(1+λ)^{|N(A)|}`.
pub fn decorated_weight<S: Scalar>(g: &BipartiteGraph, dp: &DecoratedPolymer, p: &IsingParams<S>) -> S {
    let a = &dp.polymer;
    let e = g.edges_between(&a.a, &dp.b);
    p.lambda().powu((a.size + dp.b.len()) as u32) * p.q().powu(e as u32)
        / (S::one() + p.lambda().clone()).powu(a.neighborhood.len() as u32)
}

/// Whether `a1 ∪ a2` is 2-linked. For 2-linked inputs on one side this is
/// the same as sharing a neighbor.
pub fn incompatible(a1: &Polymer, a2: &Polymer) -> Result<bool> {
    if a1.side != a2.side {
        return Err(Error::InvalidParams("polymers lie on different sides".into()));
    }
    Ok(!a1.neighborhood.is_disjoint(&a2.neighborhood))
}

/// Pairwise compatible decorated polymers on one side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolymerConfiguration {
    pub side: Side,
    pub polymers: Vec<DecoratedPolymer>,
}

impl PolymerConfiguration {
    pub fn empty(side: Side) -> Self {
        PolymerConfiguration {
            side,
            polymers: Vec::new(),
        }
    }

    /// `∪ (A_i ∪ B_i)`.
    pub fn support(&self, n: usize) -> VertexSet {
        let mut out = VertexSet::empty(n);
        for dp in &self.polymers {
            out.union_with(&dp.support());
        }
        out
    }

    /// `∪ N(A_i)`.
    pub fn covered_neighborhood(&self, n: usize) -> VertexSet {
        let mut out = VertexSet::empty(n);
        for dp in &self.polymers {
            out.union_with(dp.polymer.neighborhood());
        }
        out
    }

    pub fn weight<S: Scalar>(&self, g: &BipartiteGraph, p: &IsingParams<S>) -> S {
        self.polymers
            .iter()
            .fold(S::one(), |acc, dp| acc * decorated_weight(g, dp, p))
    }

    /// Sorts polymers into canonical order so equal configurations compare equal.
    pub fn canonicalize(&mut self) {
        self.polymers.sort();
    }

    pub fn is_pairwise_compatible(&self) -> bool {
        self.polymers.iter().enumerate().all(|(i, x)| {
            self.polymers[i + 1..]
                .iter()
                .all(|y| !incompatible(&x.polymer, &y.polymer).unwrap_or(true))
        })
    }
}

/// `Θ̂(S)` on `side`: the maximal 2-linked components `A_i` of `S ∩ side`
/// with `B_i = S ∩ N(A_i)`. `None` when a component violates the closure
/// constraint.
pub fn recover_configuration(g: &BipartiteGraph, s: &VertexSet, side: Side) -> Option<PolymerConfiguration> {
    let mut polymers = Vec::new();
    for a in two_linked_components(g, s, side) {
        let closure_size = closure(g, &a, side).expect("components lie on one side").len();
        if !closure_fits(closure_size, g.side_size()) {
            return None;
        }
        let neighborhood = g.neighborhood(&a);
        let b = s.intersection(&neighborhood);
        polymers.push(DecoratedPolymer {
            polymer: Polymer {
                side,
                size: a.len(),
                a,
                closure_size,
                neighborhood,
            },
            b,
        });
    }
    let mut config = PolymerConfiguration { side, polymers };
    config.canonicalize();
    Some(config)
}

/// Polymer list as JSON: one object per polymer with vertices, closure size
/// and weight.
pub fn polymers_to_json<S: Scalar>(g: &BipartiteGraph, polymers: &[Polymer], p: &IsingParams<S>, budget: &Budget) -> Result<Value> {
    let items = polymers
        .iter()
        .map(|a| {
            Ok(json!({
                "side": a.side,
                "vertices": a.a,
                "closure_size": a.closure_size,
                "neighborhood": a.neighborhood,
                "weight": polymer_weight(g, a, p, WeightForm::Product, budget)?.to_json(),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Value::Array(items))
}
