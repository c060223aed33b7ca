//! Glauber dynamics with and without global flips, plus exact diagnostics.

mod conductance;
mod exact;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{BipartiteGraph, VertexSet};
use crate::model::IsingParams;
use crate::numeric::Scalar;
use crate::rng::stream_rng;

pub use conductance::{conductance_exact, ConductanceReport, MixingReport};
pub use exact::{
    detailed_balance_holds, exact_tv_curve, mixing_time, stationarity_residual, ExactChain,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    Glauber,
    GlauberWithFlips,
}

#[derive(Clone, Debug)]
pub struct ChainSpec<S> {
    pub kind: ChainKind,
    pub flip: Option<Vec<usize>>,
    pub params: IsingParams<S>,
    pub seed: u64,
}

impl<S: Scalar> ChainSpec<S> {
    /// Plain Glauber, or the flips chain with the graph's built-in
    /// automorphism.
    pub fn new(g: &BipartiteGraph, kind: ChainKind, params: IsingParams<S>, seed: u64) -> Result<Self> {
        let flip = match kind {
            ChainKind::Glauber => None,
            ChainKind::GlauberWithFlips => Some(
                g.flip_automorphism()
                    .ok_or_else(|| {
                        Error::InvalidGraph(format!(
                            "{} has no built-in flip automorphism; supply one from a file",
                            g.name()
                        ))
                    })?
                    .to_vec(),
            ),
        };
        Ok(ChainSpec { kind, flip, params, seed })
    }

    /// Replaces the flip automorphism after validating it against `g`.
    pub fn with_flip(mut self, g: &BipartiteGraph, perm: Vec<usize>) -> Result<Self> {
        g.validate_flip(&perm)?;
        self.flip = Some(perm);
        Ok(self)
    }

    fn add_probabilities(&self, d: usize) -> Vec<f64> {
        (0..=d).map(|j| self.params.add_probability(j).as_f64()).collect()
    }
}

/// One heat-bath update at a uniformly random vertex.
pub fn glauber_step<S: Scalar, R: Rng>(g: &BipartiteGraph, s: &VertexSet, p: &IsingParams<S>, rng: &mut R) -> VertexSet {
    let v = rng.gen_range(0..g.n());
    let j = g.neighbors(v).iter().filter(|&&u| s.contains(u)).count();
    let add = p.add_probability(j).as_f64();
    let mut next = s.clone();
    update(&mut next, v, add, rng);
    next
}

fn update<R: Rng>(s: &mut VertexSet, v: usize, add: f64, rng: &mut R) {
    if rng.gen::<f64>() < add {
        s.insert(v);
    } else {
        s.remove(v);
    }
}

pub fn apply_permutation(s: &VertexSet, perm: &[usize]) -> VertexSet {
    VertexSet::from_vertices(s.universe(), s.iter().map(|v| perm[v]))
}

/// A Glauber step followed, with probability 1/2, by the flip automorphism.
pub fn flip_step<S: Scalar, R: Rng>(g: &BipartiteGraph, s: &VertexSet, spec: &ChainSpec<S>, rng: &mut R) -> Result<VertexSet> {
    if spec.kind != ChainKind::GlauberWithFlips {
        return Err(Error::InvalidParams("flip_step needs the flips chain".into()));
    }
    let perm = spec
        .flip
        .as_deref()
        .ok_or_else(|| Error::InvalidParams("flips chain without an automorphism".into()))?;
    g.validate_flip(perm)?;
    let next = glauber_step(g, s, &spec.params, rng);
    Ok(if rng.gen_bool(0.5) { apply_permutation(&next, perm) } else { next })
}

/// Runs `t` steps from `s0` on stream 0 of the spec's seed.
pub fn run_chain<S: Scalar>(g: &BipartiteGraph, spec: &ChainSpec<S>, s0: &VertexSet, t: u64) -> Result<VertexSet> {
    run_replica(g, spec, s0, t, 0, |_, _| {})
}

/// Runs one replica on its own stream, calling `observe` after every step.
pub fn run_replica<S: Scalar>(
    g: &BipartiteGraph,
    spec: &ChainSpec<S>,
    s0: &VertexSet,
    t: u64,
    stream: u64,
    mut observe: impl FnMut(u64, &VertexSet),
) -> Result<VertexSet> {
    if let Some(perm) = &spec.flip {
        g.validate_flip(perm)?;
    }
    let perm = match spec.kind {
        ChainKind::Glauber => None,
        ChainKind::GlauberWithFlips => Some(
            spec.flip
                .as_deref()
                .ok_or_else(|| Error::InvalidParams("flips chain without an automorphism".into()))?,
        ),
    };
    let add = spec.add_probabilities(g.degree());
    let mut rng = stream_rng(spec.seed, stream);
    let mut s = s0.clone();
    for step in 1..=t {
        let v = rng.gen_range(0..g.n());
        let j = g.neighbors(v).iter().filter(|&&u| s.contains(u)).count();
        update(&mut s, v, add[j], &mut rng);
        if let Some(perm) = perm {
            if rng.gen_bool(0.5) {
                s = apply_permutation(&s, perm);
            }
        }
        observe(step, &s);
    }
    Ok(s)
}

/// Parses an automorphism file with one `i -> σ(i)` line per vertex.
pub fn parse_automorphism(text: &str, n: usize) -> Result<Vec<usize>> {
    let mut perm = vec![None; n];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || Error::InvalidGraph(format!("automorphism line {}: expected `i -> j`, got `{line}`", lineno + 1));
        let (a, b) = line.split_once("->").ok_or_else(bad)?;
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a >= n || b >= n {
            return Err(Error::InvalidGraph(format!("automorphism line {}: vertex out of range", lineno + 1)));
        }
        if perm[a].replace(b).is_some() {
            return Err(Error::InvalidGraph(format!("automorphism maps vertex {a} twice")));
        }
    }
    perm.into_iter()
        .enumerate()
        .map(|(v, img)| img.ok_or_else(|| Error::InvalidGraph(format!("automorphism misses vertex {v}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::generate_graph;
    use crate::numeric::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn coordinate_flip_on_q2() {
        let g = generate_graph("hypercube:2").unwrap();
        let perm = g.flip_automorphism().unwrap();
        let s = VertexSet::from_vertices(4, [0b00, 0b01]);
        let image = apply_permutation(&s, perm);
        assert_eq!(image.to_vec(), vec![0b10, 0b11]);
        assert_eq!(apply_permutation(&image, perm), s);
    }

    #[test]
    fn hard_core_steps_stay_independent() {
        let g = generate_graph("hypercube:3").unwrap();
        let p = IsingParams::new(r(3, 1), r(0, 1)).unwrap();
        let mut rng = stream_rng(1, 0);
        let mut s = VertexSet::empty(8);
        for _ in 0..2000 {
            s = glauber_step(&g, &s, &p, &mut rng);
            assert_eq!(g.induced_edges(&s), 0);
        }
    }

    #[test]
    fn run_chain_is_reproducible() {
        let g = generate_graph("hypercube:3").unwrap();
        let p = IsingParams::new(r(1, 1), r(1, 10)).unwrap();
        let spec = ChainSpec::new(&g, ChainKind::GlauberWithFlips, p, 99).unwrap();
        let s0 = VertexSet::empty(8);
        assert_eq!(run_chain(&g, &spec, &s0, 0).unwrap(), s0);
        let a = run_chain(&g, &spec, &s0, 500).unwrap();
        let b = run_chain(&g, &spec, &s0, 500).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn flips_need_an_automorphism() {
        let g = generate_graph("hypercube:2").unwrap();
        let p = IsingParams::new(r(1, 1), r(1, 2)).unwrap();
        let spec = ChainSpec::new(&g, ChainKind::Glauber, p.clone(), 0).unwrap();
        let mut rng = stream_rng(0, 0);
        assert!(flip_step(&g, &VertexSet::empty(4), &spec, &mut rng).is_err());
        let spec = ChainSpec::new(&g, ChainKind::GlauberWithFlips, p, 0).unwrap();
        assert!(spec.clone().with_flip(&g, vec![0, 1, 2, 3]).is_err());
        assert!(flip_step(&g, &VertexSet::empty(4), &spec, &mut rng).is_ok());
    }

    #[test]
    fn automorphism_file() {
        let perm = parse_automorphism("# flip\n0 -> 1\n1 -> 0\n2->3\n3 -> 2\n", 4).unwrap();
        assert_eq!(perm, vec![1, 0, 3, 2]);
        assert!(parse_automorphism("0 -> 1\n", 2).is_err());
        assert!(parse_automorphism("0 -> 1\n0 -> 0\n", 2).is_err());
        assert!(parse_automorphism("0 1\n", 2).is_err());
    }
}
