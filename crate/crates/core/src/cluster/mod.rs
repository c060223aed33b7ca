//! Ursell functions, cluster enumeration and the truncated cluster expansion.

mod tail;
mod ursell;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::budget::Budget;
use crate::error::{check_budget, Error, Result};
use crate::graphs::{for_each_connected_set_weighted, BipartiteGraph, Side};
use crate::model::IsingParams;
use crate::numeric::{convert, Rational, Scalar};
use crate::polymer::{enumerate_polymers, polymer_weight, Polymer, WeightForm};

pub use tail::{Candidate, K0Selection, K0Variant, Regime, TailBoundInputs};
pub use ursell::{connected_spanning_signed_count, ursell, ursell_by_edge_subsets};

/// A multiset of polymers with connected incompatibility graph, standing for
/// all of its distinct orderings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    /// Indices into the polymer list, one per tuple slot, ascending.
    pub polymers: Vec<usize>,
    /// Neighbor bitmasks on tuple slots; copies of one polymer are adjacent.
    pub incompat_graph: Vec<u32>,
    /// `Σ |A_i|` over tuple slots.
    pub size: usize,
    /// `m!/Π m_i!`.
    pub orderings: u64,
}

impl Cluster {
    /// `(index, multiplicity)` pairs.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &i in &self.polymers {
            match out.last_mut() {
                Some((j, m)) if *j == i => *m += 1,
                _ => out.push((i, 1)),
            }
        }
        out
    }

    /// Sum of `φ(H(Γ))` over the distinct orderings `Γ`, i.e.
    /// `c(H)/Π m_i!`.
    pub fn coefficient(&self) -> Rational {
        let denom = self
            .multiplicities()
            .iter()
            .fold(BigInt::from(1), |acc, &(_, m)| acc * (1..=m).fold(BigInt::from(1), |f, i| f * i));
        Rational::new(BigInt::from(connected_spanning_signed_count(&self.incompat_graph)), denom)
    }

    /// `coefficient · Π ω(A_i)`.
    pub fn weight<S: Scalar>(&self, weights: &[S]) -> S {
        self.polymers
            .iter()
            .fold(convert::<S>(&self.coefficient()), |acc, &i| acc * weights[i].clone())
    }
}

/// `L_{D,≤k}` together with its per-size breakdown.
#[derive(Clone, Debug)]
pub struct ClusterTruncation<S> {
    pub side: Side,
    pub k: usize,
    pub value: S,
    /// `(j, L_{D,j})` for `j = 1..=k`.
    pub per_size: Vec<(usize, S)>,
    /// Number of cluster multisets summed.
    pub ledger_count: u64,
}

impl<S: Scalar> ClusterTruncation<S> {
    /// `L_{D,≤j}` for `j ≤ k`.
    pub fn partial(&self, j: usize) -> S {
        S::sum_all(self.per_size.iter().filter(|(i, _)| *i <= j).map(|(_, l)| l.clone()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "side": self.side,
            "k": self.k,
            "value": self.value.to_json(),
            "per_size": self.per_size.iter().map(|(j, l)| json!([j, l.to_json()])).collect::<Vec<_>>(),
            "ledger_count": self.ledger_count,
        })
    }
}

struct PolymerGraph {
    adjacency: Vec<Vec<usize>>,
    sizes: Vec<usize>,
}

impl PolymerGraph {
    fn new(polymers: &[Polymer]) -> Result<Self> {
        let Some(first) = polymers.first() else {
            return Ok(PolymerGraph {
                adjacency: Vec::new(),
                sizes: Vec::new(),
            });
        };
        if polymers.iter().any(|a| a.side() != first.side()) {
            return Err(Error::InvalidParams("cluster polymers must lie on one side".into()));
        }
        let n = first.vertices().universe();
        let mut by_vertex = vec![Vec::new(); n];
        for (i, a) in polymers.iter().enumerate() {
            for u in a.neighborhood().iter() {
                by_vertex[u].push(i);
            }
        }
        let adjacency = polymers
            .par_iter()
            .enumerate()
            .map(|(i, a)| {
                let mut adj: Vec<usize> = a
                    .neighborhood()
                    .iter()
                    .flat_map(|u| by_vertex[u].iter().copied())
                    .filter(|&j| j != i)
                    .collect();
                adj.sort_unstable();
                adj.dedup();
                adj
            })
            .collect();
        Ok(PolymerGraph {
            adjacency,
            sizes: polymers.iter().map(Polymer::size).collect(),
        })
    }

    fn incompatible(&self, i: usize, j: usize) -> bool {
        i == j || self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Every cluster whose lowest polymer index is `root`.
    fn clusters_at(&self, root: usize, k: usize, mut visit: impl FnMut(Cluster)) {
        for_each_connected_set_weighted(
            self.sizes.len(),
            |i| self.adjacency[i].as_slice(),
            |i| self.sizes[i],
            root,
            k,
            true,
            |distinct| {
                let mut distinct = distinct.to_vec();
                distinct.sort_unstable();
                let base: usize = distinct.iter().map(|&i| self.sizes[i]).sum();
                let mut mult = vec![1usize; distinct.len()];
                self.spread(&distinct, &mut mult, 0, k - base, &mut visit);
                true
            },
        );
    }

    // Distributes the remaining size budget as extra copies.
    fn spread(&self, distinct: &[usize], mult: &mut [usize], pos: usize, room: usize, visit: &mut impl FnMut(Cluster)) {
        if pos == distinct.len() {
            visit(self.build(distinct, mult));
            return;
        }
        let size = self.sizes[distinct[pos]];
        let mut extra = 0;
        loop {
            mult[pos] = 1 + extra;
            self.spread(distinct, mult, pos + 1, room - extra * size, visit);
            extra += 1;
            if extra * size > room {
                break;
            }
        }
        mult[pos] = 1;
    }

    fn build(&self, distinct: &[usize], mult: &[usize]) -> Cluster {
        let polymers: Vec<usize> = distinct
            .iter()
            .zip(mult)
            .flat_map(|(&i, &m)| std::iter::repeat(i).take(m))
            .collect();
        let m = polymers.len();
        let incompat_graph = (0..m)
            .map(|s| {
                (0..m)
                    .filter(|&t| t != s && self.incompatible(polymers[s], polymers[t]))
                    .fold(0u32, |acc, t| acc | 1 << t)
            })
            .collect();
        let size = polymers.iter().map(|&i| self.sizes[i]).sum();
        let mut orderings = (1..=m as u64).product::<u64>();
        for &mi in mult {
            orderings /= (1..=mi as u64).product::<u64>();
        }
        Cluster {
            polymers,
            incompat_graph,
            size,
            orderings,
        }
    }
}

/// All clusters of total size at most `k`, sorted by size and then by
/// polymer indices.
pub fn enumerate_clusters(polymers: &[Polymer], k: usize, budget: &Budget) -> Result<Vec<Cluster>> {
    check_budget("cluster size", k as u64, budget.cluster_size.min(budget.ursell_vertices) as u64)?;
    let pg = PolymerGraph::new(polymers)?;
    let mut clusters: Vec<Cluster> = (0..polymers.len())
        .into_par_iter()
        .flat_map_iter(|root| {
            let mut found = Vec::new();
            pg.clusters_at(root, k, |c| found.push(c));
            found
        })
        .collect();
    clusters.sort_by(|a, b| (a.size, &a.polymers).cmp(&(b.size, &b.polymers)));
    Ok(clusters)
}

/// `L_{≤k}` of an arbitrary polymer list with the given weights.
pub fn truncation_of<S: Scalar>(side: Side, polymers: &[Polymer], weights: &[S], k: usize, budget: &Budget) -> Result<ClusterTruncation<S>> {
    check_budget("cluster size", k as u64, budget.cluster_size.min(budget.ursell_vertices) as u64)?;
    if weights.len() != polymers.len() {
        return Err(Error::InvalidParams("one weight per polymer required".into()));
    }
    let pg = PolymerGraph::new(polymers)?;
    // Per-root partial sums are combined in root order so float results do
    // not depend on scheduling.
    let per_root: Vec<(Vec<Vec<S>>, u64)> = (0..polymers.len())
        .into_par_iter()
        .map(|root| {
            let mut terms: Vec<Vec<S>> = vec![Vec::new(); k + 1];
            let mut count = 0u64;
            pg.clusters_at(root, k, |c| {
                terms[c.size].push(c.weight(weights));
                count += 1;
            });
            (terms, count)
        })
        .collect();
    let mut by_size: Vec<Vec<S>> = vec![Vec::new(); k + 1];
    let mut ledger_count = 0;
    for (terms, count) in per_root {
        for (j, t) in terms.into_iter().enumerate() {
            by_size[j].extend(t);
        }
        ledger_count += count;
    }
    let per_size: Vec<(usize, S)> = by_size
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(j, t)| (j, S::sum_all(t)))
        .collect();
    Ok(ClusterTruncation {
        side,
        k,
        value: S::sum_all(per_size.iter().map(|(_, l)| l.clone())),
        per_size,
        ledger_count,
    })
}

fn product_weights<S: Scalar>(g: &BipartiteGraph, polymers: &[Polymer], p: &IsingParams<S>, budget: &Budget) -> Result<Vec<S>> {
    polymers
        .iter()
        .map(|a| polymer_weight(g, a, p, WeightForm::Product, budget))
        .collect()
}

/// `L_{D,≤k}` over the polymers of `side` with product-form weights.
#[allow(non_snake_case)]
pub fn compute_L<S: Scalar>(g: &BipartiteGraph, side: Side, k: usize, p: &IsingParams<S>, budget: &Budget) -> Result<ClusterTruncation<S>> {
    check_budget("cluster size", k as u64, budget.cluster_size.min(budget.ursell_vertices) as u64)?;
    let polymers = enumerate_polymers(g, side, k);
    let weights = product_weights(g, &polymers, p, budget)?;
    truncation_of(side, &polymers, &weights, k, budget)
}

/// `Ξ` of an arbitrary polymer list: the sum over pairwise compatible
/// subsets of the product of weights.
pub fn xi_from_polymers<S: Scalar>(polymers: &[Polymer], weights: &[S], budget: &Budget) -> Result<S> {
    let limit = budget.xi_configurations;
    let mut terms = Vec::new();
    let Some(first) = polymers.first() else {
        return Ok(S::one());
    };
    let n = first.vertices().universe();
    let mut covered = crate::graphs::VertexSet::empty(n);
    fn walk<S: Scalar>(
        polymers: &[Polymer],
        weights: &[S],
        start: usize,
        covered: &mut crate::graphs::VertexSet,
        acc: S,
        terms: &mut Vec<S>,
        limit: u64,
    ) -> Result<()> {
        terms.push(acc.clone());
        check_budget("polymer configurations", terms.len() as u64, limit)?;
        for i in start..polymers.len() {
            let nb = polymers[i].neighborhood();
            if nb.is_disjoint(covered) {
                let before = covered.clone();
                covered.union_with(nb);
                walk(polymers, weights, i + 1, covered, acc.clone() * weights[i].clone(), terms, limit)?;
                *covered = before;
            }
        }
        Ok(())
    }
    walk(polymers, weights, 0, &mut covered, S::one(), &mut terms, limit)?;
    Ok(S::sum_all(terms))
}

/// Exact `Ξ_D` by enumerating every polymer configuration of `side`.
pub fn xi_exact<S: Scalar>(g: &BipartiteGraph, side: Side, p: &IsingParams<S>, budget: &Budget) -> Result<S> {
    check_budget("side size for full polymer enumeration", g.side_size() as u64, budget.exhaustive_vertices as u64)?;
    let polymers = enumerate_polymers(g, side, g.side_size());
    let weights = product_weights(g, &polymers, p, budget)?;
    xi_from_polymers(&polymers, &weights, budget)
}
