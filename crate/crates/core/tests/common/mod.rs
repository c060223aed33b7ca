//! Independent reference implementations shared by the integration tests.
//! None of these call into the library routines they check.
#![allow(dead_code)]

use expander_ising::numeric::Rational;
use expander_ising::{BipartiteGraph, Scalar, Side, VertexSet};
use num_bigint::BigInt;
use rand::Rng;

pub fn r(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Random rationals `num/den` with `den` in `1..=max_den`, inside `(lo, hi]`
/// as fractions of `den`.
pub fn random_ratio<R: Rng>(rng: &mut R, max_den: i64, lo_num: i64, hi_num_per_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(lo_num..=hi_num_per_den * den);
    r(num, den)
}

/// `Σ_{F ⊆ E, (V, F) connected} (-1)^{|F|}` by deletion and contraction on
/// a multigraph: `f(G) = f(G - e) - f(G / e)`, and `f = 0` with a loop.
pub fn signed_connected_count(n: usize, edges: &[(usize, usize)]) -> i64 {
    let Some((&(a, b), rest)) = edges.split_first() else {
        return i64::from(n == 1);
    };
    if a == b {
        return 0;
    }
    if !connected(n, edges) {
        return 0;
    }
    let deleted = signed_connected_count(n, rest);
    // Merge b into a, then move the last vertex into b's slot.
    let last = n - 1;
    let relabel = |x: usize| {
        let x = if x == b { a } else { x };
        if x == last {
            b
        } else {
            x
        }
    };
    let a_new = relabel(a);
    let contracted: Vec<(usize, usize)> = rest
        .iter()
        .map(|&(u, v)| (relabel(u), relabel(v)))
        .map(|(u, v)| if u == a_new && v == a_new { (a_new, a_new) } else { (u, v) })
        .collect();
    deleted - signed_connected_count(n - 1, &contracted)
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut parts = n;
    for &(u, v) in edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            parts -= 1;
        }
    }
    parts <= 1
}

pub fn edges_of(adj: &[u32]) -> Vec<(usize, usize)> {
    let n = adj.len();
    (0..n)
        .flat_map(|u| (u + 1..n).filter(move |&v| adj[u] >> v & 1 == 1).map(move |v| (u, v)))
        .collect()
}

/// Ursell function via deletion and contraction.
pub fn ursell_oracle(adj: &[u32]) -> Rational {
    let n = adj.len();
    let fact: BigInt = (1..=n).fold(BigInt::from(1), |acc, i| acc * i);
    Rational::new(BigInt::from(signed_connected_count(n, &edges_of(adj))), fact)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative adjacency per isomorphism class of connected graphs
/// on `n` vertices.
pub fn connected_graph_classes(n: usize) -> Vec<Vec<u32>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let perms = permutations(n);
    let code = |edges: &[(usize, usize)], perm: &[usize]| -> u64 {
        let mut c = 0u64;
        for &(u, v) in edges {
            let (a, b) = (perm[u].min(perm[v]), perm[u].max(perm[v]));
            let idx = pairs.iter().position(|&p| p == (a, b)).unwrap();
            c |= 1 << idx;
        }
        c
    };
    let mut seen = std::collections::BTreeSet::new();
    let mut classes = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let edges: Vec<(usize, usize)> = (0..pairs.len()).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        if !connected(n, &edges) {
            continue;
        }
        let canon = perms.iter().map(|p| code(&edges, p)).min().unwrap();
        if seen.insert(canon) {
            let mut adj = vec![0u32; n];
            for (u, v) in edges {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
            classes.push(adj);
        }
    }
    classes
}

/// Independent sets by branching on the lowest undecided vertex.
pub fn independent_set_count(g: &BipartiteGraph) -> u64 {
    fn go(g: &BipartiteGraph, v: usize, blocked: &mut Vec<u32>) -> u64 {
        if v == g.n() {
            return 1;
        }
        let mut total = go(g, v + 1, blocked);
        if blocked[v] == 0 {
            for &u in g.neighbors(v) {
                blocked[u] += 1;
            }
            total += go(g, v + 1, blocked);
            for &u in g.neighbors(v) {
                blocked[u] -= 1;
            }
        }
        total
    }
    go(g, 0, &mut vec![0; g.n()])
}

/// `λ^{|S|} q^{|E(S)|}` from the edge list.
pub fn weight_oracle<S: Scalar>(g: &BipartiteGraph, s: &VertexSet, lambda: &S, q: &S) -> S {
    let e = g.edges().filter(|&(u, v)| s.contains(u) && s.contains(v)).count();
    lambda.powu(s.len() as u32) * q.powu(e as u32)
}

/// Whether every component of `S ∩ side`, under "shares a neighbor", has a
/// closure `{u ∈ side : N(u) ⊆ N(A)}` of at most three quarters of the side.
pub fn admissible_on_side(g: &BipartiteGraph, s: &VertexSet, side: Side) -> bool {
    let members: Vec<usize> = s.iter().filter(|&v| g.side_of(v) == side).collect();
    let side_vertices = g.side_vertices(side);
    let shares = |u: usize, v: usize| g.neighbors(u).iter().any(|w| g.neighbors(v).contains(w));
    let mut label = vec![usize::MAX; members.len()];
    for start in 0..members.len() {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = start;
        let mut stack = vec![start];
        let mut comp = vec![members[start]];
        while let Some(i) = stack.pop() {
            for j in 0..members.len() {
                if label[j] == usize::MAX && shares(members[i], members[j]) {
                    label[j] = start;
                    stack.push(j);
                    comp.push(members[j]);
                }
            }
        }
        let nbhd: std::collections::BTreeSet<usize> = comp.iter().flat_map(|&v| g.neighbors(v).iter().copied()).collect();
        let closure = side_vertices
            .iter()
            .filter(|&&u| g.neighbors(u).iter().all(|w| nbhd.contains(w)))
            .count();
        if 4 * closure > 3 * side_vertices.len() {
            return false;
        }
    }
    true
}

/// Brute-force count of subsets of `v`'s side of size `ell` containing `v`
/// that are connected under "shares a neighbor".
pub fn two_linked_count_oracle(g: &BipartiteGraph, v: usize, ell: usize) -> u64 {
    let others: Vec<usize> = g.side_vertices(g.side_of(v)).into_iter().filter(|&u| u != v).collect();
    let shares = |u: usize, w: usize| g.neighbors(u).iter().any(|x| g.neighbors(w).contains(x));
    let mut count = 0;
    let mut choose = Vec::new();
    fn subsets(
        others: &[usize],
        start: usize,
        need: usize,
        chosen: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if need == 0 {
            visit(chosen);
            return;
        }
        for i in start..others.len() {
            chosen.push(others[i]);
            subsets(others, i + 1, need - 1, chosen, visit);
            chosen.pop();
        }
    }
    subsets(&others, 0, ell.saturating_sub(1), &mut choose, &mut |rest| {
        let mut set = vec![v];
        set.extend_from_slice(rest);
        let mut reached = vec![false; set.len()];
        reached[0] = true;
        let mut stack = vec![0];
        while let Some(i) = stack.pop() {
            for j in 0..set.len() {
                if !reached[j] && shares(set[i], set[j]) {
                    reached[j] = true;
                    stack.push(j);
                }
            }
        }
        if reached.iter().all(|&x| x) {
            count += 1;
        }
    });
    if ell == 0 {
        0
    } else {
        count
    }
}
