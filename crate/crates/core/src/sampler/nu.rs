use std::collections::BTreeMap;

use rand::Rng;

use super::{restricted_Z, PolymerSystem, RestrictedModel, ZMethod};
use crate::budget::Budget;
use crate::error::{check_budget, Result};
use crate::graphs::BipartiteGraph;
use crate::model::IsingParams;
use crate::numeric::Scalar;
use crate::polymer::{DecoratedPolymer, PolymerConfiguration};

/// The choices at vertex `v` with their unnormalized weights `Y`.
fn options<S: Scalar>(
    g: &BipartiteGraph,
    sys: &PolymerSystem<S>,
    rm: &RestrictedModel,
    v: usize,
    p: &IsingParams<S>,
    method: ZMethod,
    budget: &Budget,
) -> Result<Vec<(Option<DecoratedPolymer>, S)>> {
    // Vertices are processed in ascending order, so a polymer avoiding the
    // processed set and containing v has v as its minimum.
    let covered = rm.anchored.covered_neighborhood(g.n());
    let list: Vec<usize> = sys.by_min[v]
        .iter()
        .copied()
        .filter(|&i| rm.admits(&sys.polymers[i], &covered))
        .collect();
    if list.is_empty() {
        return Ok(vec![(None, S::one())]);
    }
    let next = rm.exclude(v);
    let mut out = vec![(None, restricted_Z(sys, &next, method, budget)?)];
    for i in list {
        let decorations = sys.decorations(g, i, p, budget)?;
        // Compatibility only looks at A, so every B shares one restricted model.
        let z = restricted_Z(sys, &next.anchor(decorations[0].0.clone()), method, budget)?;
        for (dp, w) in decorations {
            out.push((Some(dp), w * z.clone()));
        }
    }
    Ok(out)
}

/// Samples a decorated polymer configuration vertex by vertex, in
/// ascending order.
pub fn sample_nu<S: Scalar, R: Rng>(
    g: &BipartiteGraph,
    sys: &PolymerSystem<S>,
    p: &IsingParams<S>,
    method: ZMethod,
    budget: &Budget,
    rng: &mut R,
) -> Result<PolymerConfiguration> {
    let mut rm = RestrictedModel::full(g.n(), sys.side());
    for v in 0..g.n() {
        let opts = options(g, sys, &rm, v, p, method, budget)?;
        let chosen = if opts.len() == 1 {
            0
        } else {
            let ys: Vec<f64> = opts.iter().map(|(_, y)| y.as_f64().max(0.0)).collect();
            let total: f64 = ys.iter().sum();
            let mut u = rng.gen::<f64>() * total;
            let mut pick = ys.len() - 1;
            for (i, y) in ys.iter().enumerate() {
                if u < *y {
                    pick = i;
                    break;
                }
                u -= y;
            }
            pick
        };
        rm = match opts.into_iter().nth(chosen).expect("index in range").0 {
            Some(dp) => rm.exclude(v).anchor(dp),
            None => rm.exclude(v),
        };
    }
    Ok(rm.anchored)
}

type Leaves<S> = BTreeMap<Vec<DecoratedPolymer>, S>;

/// Output distribution of `sample_nu`: every leaf of its decision tree
/// with the product of the step probabilities `Y/ΣY` along the path.
pub fn nu_decision_tree<S: Scalar>(
    g: &BipartiteGraph,
    sys: &PolymerSystem<S>,
    p: &IsingParams<S>,
    method: ZMethod,
    budget: &Budget,
) -> Result<Vec<(PolymerConfiguration, S)>> {
    fn descend<S: Scalar>(
        g: &BipartiteGraph,
        sys: &PolymerSystem<S>,
        p: &IsingParams<S>,
        method: ZMethod,
        budget: &Budget,
        rm: RestrictedModel,
        v: usize,
        prob: S,
        leaves: &mut Leaves<S>,
    ) -> Result<()> {
        if v == g.n() {
            check_budget("decision tree leaves", leaves.len() as u64 + 1, budget.xi_configurations)?;
            let entry = leaves.entry(rm.anchored.polymers).or_insert_with(S::zero);
            *entry = entry.clone() + prob;
            return Ok(());
        }
        let opts = options(g, sys, &rm, v, p, method, budget)?;
        let total = S::sum_all(opts.iter().map(|(_, y)| y.clone()));
        for (choice, y) in opts {
            let next = match choice {
                Some(dp) => rm.exclude(v).anchor(dp),
                None => rm.exclude(v),
            };
            descend(g, sys, p, method, budget, next, v + 1, prob.clone() * y / total.clone(), leaves)?;
        }
        Ok(())
    }
    let mut leaves = Leaves::new();
    descend(g, sys, p, method, budget, RestrictedModel::full(g.n(), sys.side()), 0, S::one(), &mut leaves)?;
    Ok(into_configs(sys, leaves))
}

/// `ν_D(Θ̂) = ω(Θ̂)/Ξ_D` over every decorated configuration.
pub fn nu_exact<S: Scalar>(g: &BipartiteGraph, sys: &PolymerSystem<S>, p: &IsingParams<S>, budget: &Budget) -> Result<Vec<(PolymerConfiguration, S)>> {
    let mut items = Vec::new();
    for i in 0..sys.polymers().len() {
        items.extend(sys.decorations(g, i, p, budget)?);
    }
    let mut leaves = Leaves::new();
    fn walk<S: Scalar>(items: &[(DecoratedPolymer, S)], start: usize, chosen: &mut Vec<usize>, leaves: &mut Leaves<S>, limit: u64) -> Result<()> {
        let mut config: Vec<DecoratedPolymer> = chosen.iter().map(|&i| items[i].0.clone()).collect();
        config.sort();
        let w = chosen.iter().fold(S::one(), |acc, &i| acc * items[i].1.clone());
        leaves.insert(config, w);
        check_budget("decorated polymer configurations", leaves.len() as u64, limit)?;
        for i in start..items.len() {
            let a = items[i].0.polymer.neighborhood();
            if chosen.iter().all(|&j| items[j].0.polymer.neighborhood().is_disjoint(a)) {
                chosen.push(i);
                walk(items, i + 1, chosen, leaves, limit)?;
                chosen.pop();
            }
        }
        Ok(())
    }
    walk(&items, 0, &mut Vec::new(), &mut leaves, budget.xi_configurations)?;
    let xi = S::sum_all(leaves.values().cloned());
    for w in leaves.values_mut() {
        *w = w.clone() / xi.clone();
    }
    Ok(into_configs(sys, leaves))
}

fn into_configs<S: Scalar>(sys: &PolymerSystem<S>, leaves: Leaves<S>) -> Vec<(PolymerConfiguration, S)> {
    leaves
        .into_iter()
        .map(|(polymers, w)| (PolymerConfiguration { side: sys.side(), polymers }, w))
        .collect()
}
