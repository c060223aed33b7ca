use rayon::prelude::*;
use serde::Serialize;

use super::IsingParams;
use crate::budget::Budget;
use crate::error::{check_budget, Result};
use crate::graphs::{BipartiteGraph, VertexSet};
use crate::numeric::Scalar;

/// Number of vertex subsets with each (size, induced edge count).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityOfStates {
    /// `counts[k][e]` subsets with `k` vertices and `e` induced edges.
    pub counts: Vec<Vec<u64>>,
}

impl DensityOfStates {
    /// Enumerates all `2^n` subsets, split into a high and a low half so that
    /// cross edges are accumulated incrementally.
    pub fn compute(g: &BipartiteGraph, budget: &Budget) -> Result<Self> {
        let n = g.n();
        check_budget("vertex count for exhaustive enumeration", n as u64, budget.exhaustive_vertices as u64)?;
        let masks = g.masks().expect("budget keeps n within mask range");
        let m = g.edge_count();
        let lo = n / 2;
        let hi = n - lo;

        let low_edges = induced_table(masks, lo, 0);
        let high_edges = induced_table(masks, hi, lo);

        let counts = (0u64..1 << hi)
            .into_par_iter()
            .fold(
                || vec![vec![0u64; m + 1]; n + 1],
                |mut acc, h| {
                    let high = h << lo;
                    let mut cross = vec![0u32; 1 << lo];
                    for l in 1usize..1 << lo {
                        let b = l.trailing_zeros() as usize;
                        cross[l] = cross[l & (l - 1)] + (masks[b] & high).count_ones();
                    }
                    let hk = h.count_ones() as usize;
                    let he = high_edges[h as usize] as usize;
                    for l in 0usize..1 << lo {
                        let k = hk + l.count_ones() as usize;
                        let e = he + low_edges[l] as usize + cross[l] as usize;
                        acc[k][e] += 1;
                    }
                    acc
                },
            )
            .reduce(
                || vec![vec![0u64; m + 1]; n + 1],
                |mut a, b| {
                    for (ra, rb) in a.iter_mut().zip(b) {
                        for (x, y) in ra.iter_mut().zip(rb) {
                            *x += y;
                        }
                    }
                    a
                },
            );
        Ok(DensityOfStates { counts })
    }

    pub fn evaluate<S: Scalar>(&self, p: &IsingParams<S>) -> S {
        let lambda_pow: Vec<S> = (0..self.counts.len()).map(|k| p.lambda().powu(k as u32)).collect();
        let q_pow: Vec<S> = (0..self.counts[0].len()).map(|e| p.q().powu(e as u32)).collect();
        let terms = self.counts.iter().enumerate().flat_map(|(k, row)| {
            let lambda_pow = &lambda_pow;
            let q_pow = &q_pow;
            row.iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(move |(e, &c)| S::from_u64(c) * lambda_pow[k].clone() * q_pow[e].clone())
        });
        S::sum_all(terms)
    }
}

/// Induced edge counts for all subsets of the `width` vertices starting at
/// `offset`.
fn induced_table(masks: &[u64], width: usize, offset: usize) -> Vec<u16> {
    let mut table = vec![0u16; 1 << width];
    for s in 1usize..1 << width {
        let b = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        let rest_global = (rest as u64) << offset;
        table[s] = table[rest] + (masks[b + offset] & rest_global).count_ones() as u16;
    }
    table
}

/// Induced edge count of every subset, indexed by bitmask.
pub fn induced_edge_table(g: &BipartiteGraph, budget: &Budget) -> Result<Vec<u16>> {
    check_budget("vertex count for exhaustive enumeration", g.n() as u64, budget.exhaustive_vertices as u64)?;
    Ok(induced_table(g.masks().expect("n within mask range"), g.n(), 0))
}

/// `Z = Σ_S λ^{|S|} q^{|E(S)|}` over all subsets.
pub fn partition_exact<S: Scalar>(g: &BipartiteGraph, p: &IsingParams<S>, budget: &Budget) -> Result<S> {
    Ok(DensityOfStates::compute(g, budget)?.evaluate(p))
}

/// A probability vector over vertex subsets, indexed by bitmask.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<S> {
    n: usize,
    probs: Vec<S>,
}

impl<S: Scalar> Distribution<S> {
    pub fn from_probs(n: usize, probs: Vec<S>) -> Self {
        assert_eq!(probs.len(), 1 << n, "distribution length must be 2^n");
        Distribution { n, probs }
    }

    /// Normalizes a weight vector.
    pub fn from_weights(n: usize, weights: Vec<S>) -> Self {
        let total = S::sum_all(weights.iter().cloned());
        let probs = weights.into_iter().map(|w| w / total.clone()).collect();
        Self::from_probs(n, probs)
    }

    pub fn point_mass(n: usize, state: u64) -> Self {
        let mut probs = vec![S::zero(); 1 << n];
        probs[state as usize] = S::one();
        Distribution { n, probs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<S> {
        self.probs
    }

    pub fn prob(&self, s: &VertexSet) -> &S {
        &self.probs[s.to_mask().expect("distribution states fit in a mask") as usize]
    }

    pub fn prob_mask(&self, mask: u64) -> &S {
        &self.probs[mask as usize]
    }

    pub fn total(&self) -> S {
        S::sum_all(self.probs.iter().cloned())
    }

    /// `½ Σ |μ(x) - ν(x)|`.
    pub fn tv(&self, other: &Self) -> S {
        assert_eq!(self.n, other.n, "distributions over different state spaces");
        let diffs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a.clone() - b.clone()).abs());
        S::sum_all(diffs) / S::from_u64(2)
    }

    /// Probability of the set of states satisfying `pred`.
    pub fn mass_where(&self, pred: impl Fn(u64) -> bool) -> S {
        S::sum_all(
            self.probs
                .iter()
                .enumerate()
                .filter(|(m, _)| pred(*m as u64))
                .map(|(_, p)| p.clone()),
        )
    }
}

/// `μ(S) = ω̃(S)/Z` for every subset.
pub fn gibbs_exact<S: Scalar>(g: &BipartiteGraph, p: &IsingParams<S>, budget: &Budget) -> Result<Distribution<S>> {
    let edges = induced_edge_table(g, budget)?;
    let n = g.n();
    let lambda_pow: Vec<S> = (0..=n).map(|k| p.lambda().powu(k as u32)).collect();
    let q_pow: Vec<S> = (0..=g.edge_count()).map(|e| p.q().powu(e as u32)).collect();
    let weights = edges
        .iter()
        .enumerate()
        .map(|(mask, &e)| lambda_pow[mask.count_ones() as usize].clone() * q_pow[e as usize].clone())
        .collect();
    Ok(Distribution::from_weights(n, weights))
}
