use serde::Serialize;

use crate::error::{Error, Result};

/// Limits for the exhaustive routines. Exceeding one is an error, never a
/// silent approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Largest `n` for sums over all `2^n` vertex subsets.
    pub exhaustive_vertices: usize,
    /// Largest `|E|` for the percolation sum over edge subsets.
    pub percolation_edges: usize,
    /// Largest `n` for exact Markov-chain operators on `2^n` states.
    pub state_space_vertices: usize,
    /// Largest subset size checked in the expansion conditions.
    pub expansion_subset_size: usize,
    /// Largest graph handed to the Ursell function.
    pub ursell_vertices: usize,
    /// Largest `|N(A)|` for the literal sum form of a polymer weight.
    pub sum_form_neighbors: usize,
    /// Largest number of polymer configurations enumerated for `Ξ`.
    pub xi_configurations: u64,
    /// Largest cluster size `k` for truncated cluster expansions.
    pub cluster_size: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            exhaustive_vertices: 24,
            percolation_edges: 20,
            state_space_vertices: 16,
            expansion_subset_size: 12,
            ursell_vertices: 9,
            sum_form_neighbors: 24,
            xi_configurations: 1 << 20,
            cluster_size: 9,
        }
    }
}

impl Budget {
    /// Applies overrides written as a plain integer, which sets every
    /// vertex-count limit, or as comma-separated `field=value` pairs.
    pub fn with_overrides(mut self, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(self);
        }
        let bad = |m: String| Error::InvalidParams(format!("budget override `{text}`: {m}"));
        if let Ok(n) = text.parse::<usize>() {
            self.exhaustive_vertices = n;
            self.state_space_vertices = n;
            return Ok(self);
        }
        for item in text.split(',') {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| bad(format!("expected `field=value`, got `{item}`")))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| bad(format!("`{value}` is not a non-negative integer")))?;
            let as_usize = value as usize;
            match key.trim() {
                "exhaustive_vertices" => self.exhaustive_vertices = as_usize,
                "percolation_edges" => self.percolation_edges = as_usize,
                "state_space_vertices" => self.state_space_vertices = as_usize,
                "expansion_subset_size" => self.expansion_subset_size = as_usize,
                "ursell_vertices" => self.ursell_vertices = as_usize,
                "sum_form_neighbors" => self.sum_form_neighbors = as_usize,
                "xi_configurations" => self.xi_configurations = value,
                "cluster_size" => self.cluster_size = as_usize,
                other => return Err(bad(format!("unknown field `{other}`"))),
            }
        }
        Ok(self)
    }
}
