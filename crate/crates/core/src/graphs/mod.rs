//! Bipartite regular graphs and the set primitives built on them.

mod class;
mod generate;
mod linked;
mod vertex_set;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use class::{validate_class, ClassReport, ExpansionCheck};
pub use generate::{generate_graph, parse_edge_list};
pub use linked::{
    closure, count_two_linked, for_each_connected_set, for_each_connected_set_weighted, is_two_linked,
    two_linked_components,
};
pub use vertex_set::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Odd,
    Even,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Odd => Side::Even,
            Side::Even => Side::Odd,
        }
    }

    pub const BOTH: [Side; 2] = [Side::Odd, Side::Even];
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Odd => "odd",
            Side::Even => "even",
        })
    }
}

/// An immutable `d`-regular bipartite graph with sides of equal size.
#[derive(Clone, Debug)]
pub struct BipartiteGraph {
    name: String,
    degree: usize,
    sides: Vec<Side>,
    adjacency: Vec<Vec<usize>>,
    // Same-side vertices at distance two, i.e. the square graph restricted
    // to one side.
    square: Vec<Vec<usize>>,
    masks: Option<Vec<u64>>,
    flip: Option<Vec<usize>>,
}

impl BipartiteGraph {
    /// Validates regularity, bipartiteness, symmetry and balanced sides.
    pub fn new(name: impl Into<String>, adjacency: Vec<Vec<usize>>, sides: Vec<Side>) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if sides.len() != n {
            return Err(Error::InvalidGraph("side labels do not match vertex count".into()));
        }
        let mut adjacency = adjacency;
        for (v, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if nbrs.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("vertex {v} has a repeated neighbor")));
            }
            if let Some(&u) = nbrs.iter().find(|&&u| u >= n || u == v) {
                return Err(Error::InvalidGraph(format!("vertex {v} has invalid neighbor {u}")));
            }
        }
        let degree = adjacency[0].len();
        if degree == 0 {
            return Err(Error::InvalidGraph("graph has no edges".into()));
        }
        for (v, nbrs) in adjacency.iter().enumerate() {
            if nbrs.len() != degree {
                return Err(Error::InvalidGraph(format!(
                    "not regular: vertex {v} has degree {} but vertex 0 has degree {degree}",
                    nbrs.len()
                )));
            }
            for &u in nbrs {
                if adjacency[u].binary_search(&v).is_err() {
                    return Err(Error::InvalidGraph(format!("edge {v}-{u} is not symmetric")));
                }
                if sides[u] == sides[v] {
                    return Err(Error::InvalidGraph(format!(
                        "edge {v}-{u} joins two {} vertices",
                        sides[v]
                    )));
                }
            }
        }
        let odd = sides.iter().filter(|&&s| s == Side::Odd).count();
        if 2 * odd != n {
            return Err(Error::InvalidGraph(format!(
                "sides are unbalanced: {odd} odd and {} even vertices",
                n - odd
            )));
        }

        let mut square = vec![Vec::new(); n];
        let mut seen = vec![usize::MAX; n];
        for v in 0..n {
            for &w in &adjacency[v] {
                for &u in &adjacency[w] {
                    if u != v && seen[u] != v {
                        seen[u] = v;
                        square[v].push(u);
                    }
                }
            }
            square[v].sort_unstable();
        }
        let masks = (n <= 64).then(|| {
            adjacency
                .iter()
                .map(|nbrs| nbrs.iter().fold(0u64, |m, &u| m | (1 << u)))
                .collect()
        });

        Ok(BipartiteGraph {
            name: name.into(),
            degree,
            sides,
            adjacency,
            square,
            masks,
            flip: None,
        })
    }

    /// Attaches a side-swapping automorphism after validating it.
    pub fn with_flip(mut self, perm: Vec<usize>) -> Result<Self> {
        self.validate_flip(&perm)?;
        self.flip = Some(perm);
        Ok(self)
    }

    /// Checks that `perm` is an automorphism mapping each side onto the other.
    pub fn validate_flip(&self, perm: &[usize]) -> Result<()> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::InvalidGraph(format!(
                "permutation has {} entries, graph has {n} vertices",
                perm.len()
            )));
        }
        let mut hit = vec![false; n];
        for &img in perm {
            if img >= n || std::mem::replace(&mut hit[img], true) {
                return Err(Error::InvalidGraph("flip is not a permutation".into()));
            }
        }
        for v in 0..n {
            if self.sides[perm[v]] == self.sides[v] {
                return Err(Error::InvalidGraph(format!(
                    "flip keeps vertex {v} on the {} side",
                    self.sides[v]
                )));
            }
            for &u in &self.adjacency[v] {
                if self.adjacency[perm[v]].binary_search(&perm[u]).is_err() {
                    return Err(Error::InvalidGraph(format!(
                        "flip does not preserve edge {v}-{u}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn side_of(&self, v: usize) -> Side {
        self.sides[v]
    }

    pub fn side_size(&self) -> usize {
        self.n() / 2
    }

    pub fn side_vertices(&self, side: Side) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.sides[v] == side).collect()
    }

    pub fn side_set(&self, side: Side) -> VertexSet {
        VertexSet::from_vertices(self.n(), self.side_vertices(side))
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Same-side vertices sharing at least one neighbor with `v`.
    pub fn square_neighbors(&self, v: usize) -> &[usize] {
        &self.square[v]
    }

    pub fn are_adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Whether `u != v` lie at graph distance one or two.
    pub fn within_distance_two(&self, u: usize, v: usize) -> bool {
        if self.sides[u] == self.sides[v] {
            self.square[u].binary_search(&v).is_ok()
        } else {
            self.are_adjacent(u, v)
        }
    }

    pub fn codegree(&self, u: usize, v: usize) -> usize {
        let (a, b) = (&self.adjacency[u], &self.adjacency[v]);
        let (mut i, mut j, mut c) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    c += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        c
    }

    /// Neighbor bitmasks, available when `n <= 64`.
    pub fn masks(&self) -> Option<&[u64]> {
        self.masks.as_deref()
    }

    pub fn side_mask(&self, side: Side) -> Option<u64> {
        (self.n() <= 64).then(|| {
            (0..self.n())
                .filter(|&v| self.sides[v] == side)
                .fold(0u64, |m, v| m | (1 << v))
        })
    }

    pub fn flip_automorphism(&self) -> Option<&[usize]> {
        self.flip.as_deref()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.n() * self.degree / 2
    }

    /// External neighborhood `N(S)`.
    pub fn neighborhood(&self, set: &VertexSet) -> VertexSet {
        let mut out = VertexSet::empty(self.n());
        for v in set.iter() {
            for &u in &self.adjacency[v] {
                out.insert(u);
            }
        }
        out.difference(set)
    }

    /// Number of edges with both endpoints in `set`.
    pub fn induced_edges(&self, set: &VertexSet) -> usize {
        set.iter()
            .map(|v| self.adjacency[v].iter().filter(|&&u| u > v && set.contains(u)).count())
            .sum()
    }

    /// Number of edges between `a` and `b`.
    pub fn edges_between(&self, a: &VertexSet, b: &VertexSet) -> usize {
        a.iter()
            .map(|v| self.adjacency[v].iter().filter(|&&u| b.contains(u)).count())
            .sum()
    }

    /// Serializes to the edge-list file format: a header `n d`, then one
    /// `u v` line per edge with `u < v`.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.degree);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Two-colors an undirected graph, starting each component on the even side.
pub(crate) fn two_color(adjacency: &[Vec<usize>]) -> Result<Vec<Side>> {
    let n = adjacency.len();
    let mut sides: Vec<Option<Side>> = vec![None; n];
    for start in 0..n {
        if sides[start].is_some() {
            continue;
        }
        sides[start] = Some(Side::Even);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let sv = sides[v].expect("queued vertices are colored");
            for &u in &adjacency[v] {
                match sides[u] {
                    None => {
                        sides[u] = Some(sv.other());
                        queue.push_back(u);
                    }
                    Some(su) if su == sv => {
                        return Err(Error::InvalidGraph(format!(
                            "not bipartite: odd cycle through edge {v}-{u}"
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(sides.into_iter().map(|s| s.expect("all vertices colored")).collect())
}
