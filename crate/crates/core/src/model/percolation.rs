use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::{check_budget, Error, Result};
use crate::graphs::BipartiteGraph;
use crate::numeric::Scalar;

/// Independent sets of the graph given by neighbor bitmasks, counted by size.
///
/// Branches on the lowest remaining vertex: either it is left out, or it is
/// taken and its neighbors are removed.
pub fn independence_polynomial(masks: &[u64]) -> Vec<u64> {
    let n = masks.len();
    assert!(n <= 64, "bitmask graphs have at most 64 vertices");
    let mut counts = vec![0u64; n + 1];
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    branch(masks, all, 0, &mut counts);
    counts
}

fn branch(masks: &[u64], remaining: u64, taken: usize, counts: &mut [u64]) {
    if remaining == 0 {
        counts[taken] += 1;
        return;
    }
    let v = remaining.trailing_zeros() as usize;
    let without = remaining & !(1 << v);
    branch(masks, without, taken, counts);
    branch(masks, without & !masks[v], taken + 1, counts);
}

/// Independent sets of `g` counted by size.
pub fn independent_set_counts(g: &BipartiteGraph) -> Result<Vec<u64>> {
    let masks = g
        .masks()
        .ok_or_else(|| Error::InvalidParams("independent set counting needs n <= 64".into()))?;
    Ok(independence_polynomial(masks))
}

/// `E[Z_{G_p}(λ)]`, summing the hard-core partition function of `(V, F)`
/// over every edge subset `F` with probability `p^{|F|} (1-p)^{|E|-|F|}`.
pub fn percolation_expectation<S: Scalar>(g: &BipartiteGraph, lambda: &S, p_edge: &S, budget: &Budget) -> Result<S> {
    if !(*p_edge >= S::zero() && *p_edge <= S::one()) {
        return Err(Error::InvalidParams(format!("edge probability must lie in [0, 1], got {p_edge}")));
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let m = edges.len();
    check_budget("edge count for percolation enumeration", m as u64, budget.percolation_edges as u64)?;
    let n = g.n();
    if n > 64 {
        return Err(Error::InvalidParams("percolation enumeration needs n <= 64".into()));
    }

    // table[f][k]: pairs (F, I) with |F| = f and I independent of size k in (V, F).
    let table = (0u64..1 << m)
        .into_par_iter()
        .fold(
            || vec![vec![0u64; n + 1]; m + 1],
            |mut acc, subset| {
                let mut masks = vec![0u64; n];
                for (i, &(u, v)) in edges.iter().enumerate() {
                    if subset >> i & 1 == 1 {
                        masks[u] |= 1 << v;
                        masks[v] |= 1 << u;
                    }
                }
                let f = subset.count_ones() as usize;
                for (k, c) in independence_polynomial(&masks).into_iter().enumerate() {
                    acc[f][k] += c;
                }
                acc
            },
        )
        .reduce(
            || vec![vec![0u64; n + 1]; m + 1],
            |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += y;
                    }
                }
                a
            },
        );

    let keep = p_edge.clone();
    let drop = S::one() - p_edge.clone();
    let mut terms = Vec::new();
    for (f, row) in table.iter().enumerate() {
        let prob = keep.powu(f as u32) * drop.powu((m - f) as u32);
        for (k, &c) in row.iter().enumerate() {
            if c > 0 {
                terms.push(S::from_u64(c) * prob.clone() * lambda.powu(k as u32));
            }
        }
    }
    Ok(S::sum_all(terms))
}
