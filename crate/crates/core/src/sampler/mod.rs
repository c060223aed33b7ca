//! The polymer-model sampler and partition-function approximation.

mod ising;
mod nu;

use serde::Serialize;

use crate::budget::Budget;
use crate::cluster::{truncation_of, xi_from_polymers, K0Selection, K0Variant, TailBoundInputs};
use crate::error::{check_budget, Error, Result};
use crate::graphs::{BipartiteGraph, Side, VertexSet};
use crate::model::IsingParams;
use crate::numeric::Scalar;
use crate::polymer::{decorated_weight, enumerate_polymers, polymer_weight, DecoratedPolymer, Polymer, PolymerConfiguration, WeightForm};

pub use ising::{
    approx_Z, defect_side_probability, mu_hat_exact, sample_defect_side, sample_ising, ApproxZReport, IsingSample,
    IsingSampler, MuHatReport,
};
pub use nu::{nu_decision_tree, nu_exact, sample_nu};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RestrictedZMode {
    /// Full configuration enumeration of every restricted model.
    ExactRestrictedZ,
    /// `exp` of the truncated cluster expansion, polymers of size at most `k₀`.
    TruncatedRestrictedZ,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectRule {
    /// `L_{D,≤k₀}/(L_{O,≤k₀} + L_{E,≤k₀})`.
    TruncatedLinear,
    /// Proportional to `exp(L_{D,≤k₀})`.
    TruncatedExp,
    /// Proportional to the exact `Ξ_D`.
    ExactXi,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub epsilon: f64,
    pub mode: RestrictedZMode,
    /// Replaces both `k₀` and `k₀'` when set.
    pub k_override: Option<usize>,
    pub seed: u64,
    pub defect_rule: DefectRule,
    /// Take the brute-force branch when `ε ≤ ε₀`.
    pub allow_brute_force: bool,
    pub kappa: f64,
    pub delta2: f64,
}

impl SamplerConfig {
    /// Exact restricted partition functions, the verbatim defect rule and
    /// hypercube class constants `κ = 1/2`, `Δ₂ = 2`.
    pub fn new(epsilon: f64, seed: u64) -> Self {
        SamplerConfig {
            epsilon,
            mode: RestrictedZMode::ExactRestrictedZ,
            k_override: None,
            seed,
            defect_rule: DefectRule::TruncatedLinear,
            allow_brute_force: true,
            kappa: 0.5,
            delta2: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidParams(format!("epsilon must lie in (0, 1], got {}", self.epsilon)));
        }
        if self.k_override == Some(0) {
            return Err(Error::InvalidParams("k must be at least 1".into()));
        }
        Ok(())
    }

    pub fn tail_inputs<S: Scalar>(&self, g: &BipartiteGraph, p: &IsingParams<S>) -> TailBoundInputs {
        TailBoundInputs {
            n: g.n(),
            d: g.degree(),
            kappa: self.kappa,
            delta2: self.delta2,
            lambda: p.lambda().as_f64(),
            q: p.q().as_f64(),
            epsilon: self.epsilon,
        }
    }

    /// `(k, selection)`, with `k` the override when one is set.
    pub fn k0<S: Scalar>(&self, g: &BipartiteGraph, p: &IsingParams<S>, variant: K0Variant) -> Result<(usize, K0Selection)> {
        let sel = self.tail_inputs(g, p).select_k0(variant)?;
        Ok((self.k_override.unwrap_or(sel.k0), sel))
    }
}

/// How restricted partition functions are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZMethod {
    Exact,
    Truncated { k: usize },
}

/// The polymers of one side with their summed weights `ω(A)`.
#[derive(Clone, Debug)]
pub struct PolymerSystem<S> {
    side: Side,
    n: usize,
    polymers: Vec<Polymer>,
    weights: Vec<S>,
    by_min: Vec<Vec<usize>>,
}

impl<S: Scalar> PolymerSystem<S> {
    /// Polymers of `side` up to `max_size` vertices, or all of them.
    pub fn new(g: &BipartiteGraph, side: Side, p: &IsingParams<S>, max_size: Option<usize>, budget: &Budget) -> Result<Self> {
        let k = match max_size {
            Some(k) => k.min(g.side_size()),
            None => {
                check_budget("side size for full polymer enumeration", g.side_size() as u64, budget.exhaustive_vertices as u64)?;
                g.side_size()
            }
        };
        let polymers = enumerate_polymers(g, side, k);
        let weights = polymers
            .iter()
            .map(|a| polymer_weight(g, a, p, WeightForm::Product, budget))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(g.n(), side, polymers, weights))
    }

    pub fn from_parts(n: usize, side: Side, polymers: Vec<Polymer>, weights: Vec<S>) -> Self {
        let mut by_min = vec![Vec::new(); n];
        for (i, a) in polymers.iter().enumerate() {
            by_min[a.vertices().first().expect("polymers are nonempty")].push(i);
        }
        PolymerSystem {
            side,
            n,
            polymers,
            weights,
            by_min,
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn polymers(&self) -> &[Polymer] {
        &self.polymers
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// Every `(A, B)` with `B ⊆ N(A)` and its weight `ω(A, B)`.
    pub fn decorations(&self, g: &BipartiteGraph, i: usize, p: &IsingParams<S>, budget: &Budget) -> Result<Vec<(DecoratedPolymer, S)>> {
        let a = &self.polymers[i];
        let nbhd = a.neighborhood().to_vec();
        check_budget("polymer neighborhood for decorations", nbhd.len() as u64, budget.sum_form_neighbors as u64)?;
        (0u64..1 << nbhd.len())
            .map(|mask| {
                let b = VertexSet::from_vertices(self.n, (0..nbhd.len()).filter(|j| mask >> j & 1 == 1).map(|j| nbhd[j]));
                let dp = DecoratedPolymer::new(a.clone(), b)?;
                let w = decorated_weight(g, &dp, p);
                Ok((dp, w))
            })
            .collect()
    }
}

/// `P̂(Θ̂, S)`: decorated polymers `(A, B)` with `A ∩ S = ∅` that are
/// compatible with every member of `Θ̂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedModel {
    pub excluded: VertexSet,
    pub anchored: PolymerConfiguration,
}

impl RestrictedModel {
    /// The whole polymer model of `side`.
    pub fn full(n: usize, side: Side) -> Self {
        RestrictedModel {
            excluded: VertexSet::empty(n),
            anchored: PolymerConfiguration::empty(side),
        }
    }

    pub fn exclude(&self, v: usize) -> Self {
        let mut next = self.clone();
        next.excluded.insert(v);
        next
    }

    pub fn anchor(&self, dp: DecoratedPolymer) -> Self {
        let mut next = self.clone();
        next.anchored.polymers.push(dp);
        next.anchored.canonicalize();
        next
    }

    /// Indices of the member polymers of `sys`.
    pub fn members<S: Scalar>(&self, sys: &PolymerSystem<S>) -> Vec<usize> {
        let covered = self.anchored.covered_neighborhood(sys.n);
        (0..sys.polymers.len())
            .filter(|&i| self.admits(&sys.polymers[i], &covered))
            .collect()
    }

    fn admits(&self, a: &Polymer, covered: &VertexSet) -> bool {
        a.vertices().is_disjoint(&self.excluded) && a.neighborhood().is_disjoint(covered)
    }
}

/// `Z(P̂(Θ̂, S))`. Summing `ω(A, B)` over `B` leaves `ω(A)`, so this is the
/// polymer partition function of the member polymers.
#[allow(non_snake_case)]
pub fn restricted_Z<S: Scalar>(sys: &PolymerSystem<S>, rm: &RestrictedModel, method: ZMethod, budget: &Budget) -> Result<S> {
    let members = rm.members(sys);
    let polymers: Vec<Polymer> = members.iter().map(|&i| sys.polymers[i].clone()).collect();
    let weights: Vec<S> = members.iter().map(|&i| sys.weights[i].clone()).collect();
    match method {
        ZMethod::Exact => xi_from_polymers(&polymers, &weights, budget),
        ZMethod::Truncated { k } => {
            let l = truncation_of(sys.side, &polymers, &weights, k, budget)?.value;
            l.exp().ok_or(Error::NeedsFloat("truncated restricted partition functions"))
        }
    }
}

/// `Z(P̂(Θ̂, S))` by enumerating configurations of decorated polymers.
pub fn restricted_z_by_decorations<S: Scalar>(
    g: &BipartiteGraph,
    sys: &PolymerSystem<S>,
    rm: &RestrictedModel,
    p: &IsingParams<S>,
    budget: &Budget,
) -> Result<S> {
    let mut items = Vec::new();
    for i in rm.members(sys) {
        items.extend(sys.decorations(g, i, p, budget)?);
    }
    let mut terms = Vec::new();
    fn walk<S: Scalar>(items: &[(DecoratedPolymer, S)], start: usize, chosen: &mut Vec<usize>, terms: &mut Vec<S>, limit: u64) -> Result<()> {
        let acc = chosen.iter().fold(S::one(), |acc, &i| acc * items[i].1.clone());
        terms.push(acc);
        check_budget("decorated polymer configurations", terms.len() as u64, limit)?;
        for i in start..items.len() {
            let a = &items[i].0.polymer;
            if chosen.iter().all(|&j| items[j].0.polymer.neighborhood().is_disjoint(a.neighborhood())) {
                chosen.push(i);
                walk(items, i + 1, chosen, terms, limit)?;
                chosen.pop();
            }
        }
        Ok(())
    }
    walk(&items, 0, &mut Vec::new(), &mut terms, budget.xi_configurations)?;
    Ok(S::sum_all(terms))
}

/// Both sides of
/// `Z(P̂(Θ̂,S)) = Z(P̂(Θ̂,S∪v)) + Σ_{(A,B)∈P̂(Θ̂,S), v∈A} ω(A,B) Z(P̂(Θ̂∪(A,B), S∪v))`.
pub fn fundamental_identity_check<S: Scalar>(
    g: &BipartiteGraph,
    sys: &PolymerSystem<S>,
    rm: &RestrictedModel,
    v: usize,
    p: &IsingParams<S>,
    budget: &Budget,
) -> Result<(S, S)> {
    let lhs = restricted_Z(sys, rm, ZMethod::Exact, budget)?;
    let next = rm.exclude(v);
    let mut terms = vec![restricted_Z(sys, &next, ZMethod::Exact, budget)?];
    for i in rm.members(sys) {
        if !sys.polymers[i].vertices().contains(v) {
            continue;
        }
        for (dp, w) in sys.decorations(g, i, p, budget)? {
            terms.push(w * restricted_Z(sys, &next.anchor(dp), ZMethod::Exact, budget)?);
        }
    }
    Ok((lhs, S::sum_all(terms)))
}
