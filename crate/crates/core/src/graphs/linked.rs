use super::{BipartiteGraph, Side, VertexSet};
use crate::error::{Error, Result};

fn check_side(g: &BipartiteGraph, a: &VertexSet, side: Side) -> Result<()> {
    match a.iter().find(|&v| g.side_of(v) != side) {
        Some(v) => Err(Error::InvalidParams(format!(
            "vertex {v} is on the {} side, expected {side}",
            g.side_of(v)
        ))),
        None => Ok(()),
    }
}

/// The bipartite closure `[a] = {v ∈ side : N(v) ⊆ N(a)}`.
pub fn closure(g: &BipartiteGraph, a: &VertexSet, side: Side) -> Result<VertexSet> {
    check_side(g, a, side)?;
    let nbhd = g.neighborhood(a);
    let mut out = VertexSet::empty(g.n());
    // Any member of the closure has a neighbor in N(a), so it is within
    // distance two of a.
    for u in nbhd.iter() {
        for &v in g.neighbors(u) {
            if !out.contains(v) && g.neighbors(v).iter().all(|&w| nbhd.contains(w)) {
                out.insert(v);
            }
        }
    }
    Ok(out)
}

/// Whether `set` induces a connected subgraph of `G²`. The empty set is not
/// 2-linked.
pub fn is_two_linked(g: &BipartiteGraph, set: &VertexSet) -> bool {
    let members = set.to_vec();
    let Some(&start) = members.first() else {
        return false;
    };
    let mut seen = VertexSet::from_vertices(g.n(), [start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &u in &members {
            if !seen.contains(u) && g.within_distance_two(u, v) {
                seen.insert(u);
                stack.push(u);
            }
        }
    }
    seen.len() == members.len()
}

/// Maximal 2-linked components of `s ∩ side`, ordered by minimum vertex.
pub fn two_linked_components(g: &BipartiteGraph, s: &VertexSet, side: Side) -> Vec<VertexSet> {
    let restricted = s.intersection(&g.side_set(side));
    let mut assigned = VertexSet::empty(g.n());
    let mut components = Vec::new();
    for start in restricted.iter() {
        if assigned.contains(start) {
            continue;
        }
        let mut comp = VertexSet::from_vertices(g.n(), [start]);
        assigned.insert(start);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &u in g.square_neighbors(v) {
                if restricted.contains(u) && !assigned.contains(u) {
                    assigned.insert(u);
                    comp.insert(u);
                    stack.push(u);
                }
            }
        }
        components.push(comp);
    }
    components
}

/// Enumerates every connected vertex set of size `1..=max_size` containing
/// `root` in the graph given by `adjacent`, each exactly once. Enumeration
/// stops early when `visit` returns `false`; the return value reports whether
/// it ran to completion.
///
/// With `above_root` set, only sets whose minimum is `root` are produced, so
/// looping over all roots lists every connected set once. The growth rule
/// adds a vertex to the extension only when it is outside the closed
/// neighborhood of the current set, which makes each set reachable along a
/// single path.
pub fn for_each_connected_set<'a, A, F>(
    n: usize,
    adjacent: A,
    root: usize,
    max_size: usize,
    above_root: bool,
    visit: F,
) -> bool
where
    A: Fn(usize) -> &'a [usize],
    F: FnMut(&[usize]) -> bool,
{
    for_each_connected_set_weighted(n, adjacent, |_| 1, root, max_size, above_root, visit)
}

/// As [`for_each_connected_set`], but bounding the total `weight` of the
/// set by `max_weight` instead of its size. Weights must be positive.
pub fn for_each_connected_set_weighted<'a, A, W, F>(
    n: usize,
    adjacent: A,
    weight: W,
    root: usize,
    max_weight: usize,
    above_root: bool,
    mut visit: F,
) -> bool
where
    A: Fn(usize) -> &'a [usize],
    W: Fn(usize) -> usize,
    F: FnMut(&[usize]) -> bool,
{
    let w0 = weight(root);
    if w0 > max_weight {
        return true;
    }
    let mut search = Search {
        adjacent: &adjacent,
        weight: &weight,
        marks: vec![0u32; n],
        current: vec![root],
        root,
        above_root,
    };
    search.mark(root, 1);
    let extension: Vec<usize> = adjacent(root)
        .iter()
        .copied()
        .filter(|&u| !above_root || u > root)
        .collect();
    search.extend(extension, max_weight - w0, &mut visit)
}

struct Search<'s, A, W> {
    adjacent: &'s A,
    weight: &'s W,
    marks: Vec<u32>,
    current: Vec<usize>,
    root: usize,
    above_root: bool,
}

impl<'a, A, W> Search<'_, A, W>
where
    A: Fn(usize) -> &'a [usize],
    W: Fn(usize) -> usize,
{
    fn mark(&mut self, v: usize, delta: i32) {
        let apply = |m: &mut u32| *m = (*m as i32 + delta) as u32;
        apply(&mut self.marks[v]);
        for &u in (self.adjacent)(v) {
            apply(&mut self.marks[u]);
        }
    }

    fn extend<F: FnMut(&[usize]) -> bool>(&mut self, mut extension: Vec<usize>, room: usize, visit: &mut F) -> bool {
        if !visit(&self.current) {
            return false;
        }
        while let Some(w) = extension.pop() {
            let ww = (self.weight)(w);
            if ww > room {
                continue;
            }
            let mut next = extension.clone();
            for &u in (self.adjacent)(w) {
                if self.marks[u] == 0 && (!self.above_root || u > self.root) {
                    next.push(u);
                }
            }
            self.current.push(w);
            self.mark(w, 1);
            let complete = self.extend(next, room - ww, visit);
            self.mark(w, -1);
            self.current.pop();
            if !complete {
                return false;
            }
        }
        true
    }
}

/// Number of 2-linked subsets of `v`'s side of size `ell` that contain `v`.
pub fn count_two_linked(g: &BipartiteGraph, v: usize, ell: usize) -> u64 {
    let mut count = 0u64;
    for_each_connected_set(g.n(), |u| g.square_neighbors(u), v, ell, false, |set| {
        if set.len() == ell {
            count += 1;
        }
        true
    });
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::generate_graph;

    fn set(g: &BipartiteGraph, vs: &[usize]) -> VertexSet {
        VertexSet::from_vertices(g.n(), vs.iter().copied())
    }

    #[test]
    fn closure_examples() {
        let c4 = generate_graph("cycle:4").unwrap();
        assert_eq!(closure(&c4, &set(&c4, &[0]), Side::Odd).unwrap().to_vec(), vec![0, 2]);
        let q3 = generate_graph("hypercube:3").unwrap();
        assert_eq!(closure(&q3, &set(&q3, &[0]), Side::Even).unwrap().to_vec(), vec![0]);
        assert!(closure(&q3, &set(&q3, &[]), Side::Even).unwrap().is_empty());
        assert!(closure(&q3, &set(&q3, &[1]), Side::Even).is_err());
    }

    #[test]
    fn components_examples() {
        let q3 = generate_graph("hypercube:3").unwrap();
        let comps = two_linked_components(&q3, &set(&q3, &[0b000, 0b011]), Side::Even);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].to_vec(), vec![0, 3]);
        let q4 = generate_graph("hypercube:4").unwrap();
        let comps = two_linked_components(&q4, &set(&q4, &[0b0000, 0b1111]), Side::Even);
        assert_eq!(comps.len(), 2);
        assert!(two_linked_components(&q4, &set(&q4, &[]), Side::Even).is_empty());
    }

    #[test]
    fn count_examples() {
        let q3 = generate_graph("hypercube:3").unwrap();
        assert_eq!(count_two_linked(&q3, 0, 1), 1);
        assert_eq!(count_two_linked(&q3, 0, 2), 3);
        let c4 = generate_graph("cycle:4").unwrap();
        assert_eq!(count_two_linked(&c4, 0, 2), 1);
    }

    /// Brute force over all subsets of one side.
    fn brute_force_connected(g: &BipartiteGraph, side: Side, max: usize) -> Vec<Vec<usize>> {
        let verts = g.side_vertices(side);
        let mut out = Vec::new();
        for mask in 1u64..1 << verts.len() {
            if mask.count_ones() as usize > max {
                continue;
            }
            let s = VertexSet::from_vertices(
                g.n(),
                (0..verts.len()).filter(|i| mask >> i & 1 == 1).map(|i| verts[i]),
            );
            if is_two_linked(g, &s) {
                out.push(s.to_vec());
            }
        }
        out.sort();
        out
    }

    #[test]
    fn connected_set_enumeration_matches_brute_force() {
        for spec in ["hypercube:4", "torus:4^2", "middle-layer:5", "cycle:8"] {
            let g = generate_graph(spec).unwrap();
            for side in Side::BOTH {
                let mut listed = Vec::new();
                for root in g.side_vertices(side) {
                    for_each_connected_set(g.n(), |u| g.square_neighbors(u), root, 4, true, |s| {
                        let mut s = s.to_vec();
                        s.sort();
                        listed.push(s);
                        true
                    });
                }
                let total = listed.len();
                listed.sort();
                listed.dedup();
                assert_eq!(total, listed.len(), "{spec}: duplicate emitted");
                assert_eq!(listed, brute_force_connected(&g, side, 4), "{spec}");
            }
        }
    }
}
