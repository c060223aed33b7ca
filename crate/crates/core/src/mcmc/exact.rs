use rayon::prelude::*;

use super::{ChainKind, ChainSpec};
use crate::budget::Budget;
use crate::error::{check_budget, Result};
use crate::graphs::BipartiteGraph;
use crate::model::{Distribution, IsingParams};
use crate::numeric::Scalar;

/// The one-step transition operator on all `2^n` states, applied
/// matrix-free to distribution vectors.
pub struct ExactChain<'g, S> {
    g: &'g BipartiteGraph,
    // add[j] / n and (1 - add[j]) / n for j occupied neighbors.
    up: Vec<S>,
    down: Vec<S>,
    flip_image: Option<Vec<u32>>,
}

impl<'g, S: Scalar> ExactChain<'g, S> {
    pub fn new(g: &'g BipartiteGraph, kind: ChainKind, params: &IsingParams<S>, flip: Option<&[usize]>, budget: &Budget) -> Result<Self> {
        let n = g.n();
        check_budget("vertex count for exact chain operators", n as u64, budget.state_space_vertices as u64)?;
        let n_s = S::from_u64(n as u64);
        let up: Vec<S> = (0..=g.degree()).map(|j| params.add_probability(j) / n_s.clone()).collect();
        let down = (0..=g.degree())
            .map(|j| (S::one() - params.add_probability(j)) / n_s.clone())
            .collect();
        let flip_image = match kind {
            ChainKind::Glauber => None,
            ChainKind::GlauberWithFlips => {
                let perm = flip.ok_or_else(|| crate::Error::InvalidParams("flips chain without an automorphism".into()))?;
                g.validate_flip(perm)?;
                Some(
                    (0u32..1 << n)
                        .map(|m| (0..n).filter(|&v| m >> v & 1 == 1).fold(0u32, |acc, v| acc | 1 << perm[v]))
                        .collect(),
                )
            }
        };
        Ok(ExactChain { g, up, down, flip_image })
    }

    pub fn from_spec(g: &'g BipartiteGraph, spec: &ChainSpec<S>, budget: &Budget) -> Result<Self> {
        Self::new(g, spec.kind, &spec.params, spec.flip.as_deref(), budget)
    }

    /// `x ↦ xP` for plain Glauber, `x ↦ xP·½(I + I_σ)` for the flips chain.
    pub fn step(&self, dist: &[S]) -> Vec<S> {
        let n = self.g.n();
        let masks = self.g.masks().expect("budget keeps n within mask range");
        let glauber: Vec<S> = (0..dist.len())
            .into_par_iter()
            .map(|y| {
                let mut acc = S::zero();
                for (v, &nb) in masks.iter().enumerate().take(n) {
                    let bit = 1usize << v;
                    let j = (nb & y as u64).count_ones() as usize;
                    // Both y and y with v toggled move to y when v is resampled.
                    let pair = dist[y].clone() + dist[y ^ bit].clone();
                    let rate = if y & bit != 0 { &self.up[j] } else { &self.down[j] };
                    acc = acc + pair * rate.clone();
                }
                acc
            })
            .collect();
        match &self.flip_image {
            None => glauber,
            Some(image) => {
                let half = S::from_ratio(1, 2);
                let mut out: Vec<S> = glauber.iter().map(|x| x.clone() * half.clone()).collect();
                for (x, w) in glauber.into_iter().enumerate() {
                    let y = image[x] as usize;
                    out[y] = out[y].clone() + w * half.clone();
                }
                out
            }
        }
    }

    /// Transition probability `P(x, y)` of plain Glauber.
    pub fn glauber_prob(&self, x: u64, y: u64) -> S {
        let masks = self.g.masks().expect("mask range");
        let diff = x ^ y;
        match diff.count_ones() {
            0 => {
                let mut acc = S::zero();
                for (v, &nb) in masks.iter().enumerate() {
                    let j = (nb & x).count_ones() as usize;
                    acc = acc + if x >> v & 1 == 1 { self.up[j].clone() } else { self.down[j].clone() };
                }
                acc
            }
            1 => {
                let v = diff.trailing_zeros() as usize;
                let j = (masks[v] & x).count_ones() as usize;
                if y & diff != 0 {
                    self.up[j].clone()
                } else {
                    self.down[j].clone()
                }
            }
            _ => S::zero(),
        }
    }
}

/// `max_y |(μP)(y) - μ(y)|`.
pub fn stationarity_residual<S: Scalar>(chain: &ExactChain<'_, S>, mu: &Distribution<S>) -> S {
    let next = chain.step(mu.probs());
    next.iter()
        .zip(mu.probs())
        .map(|(a, b)| (a.clone() - b.clone()).abs())
        .fold(S::zero(), |m, d| if d > m { d } else { m })
}

/// Checks `μ(x)P(x,y) = μ(y)P(y,x)` for every pair differing in one vertex;
/// other pairs have `P = 0` in both directions.
pub fn detailed_balance_holds<S: Scalar>(chain: &ExactChain<'_, S>, mu: &Distribution<S>, tol: &S) -> bool {
    let n = chain.g.n();
    (0u64..1 << n).into_par_iter().all(|x| {
        (0..n).filter(|&v| x >> v & 1 == 0).all(|v| {
            let y = x | 1 << v;
            let lhs = mu.prob_mask(x).clone() * chain.glauber_prob(x, y);
            let rhs = mu.prob_mask(y).clone() * chain.glauber_prob(y, x);
            (lhs - rhs).abs() <= *tol
        })
    })
}

/// `(t, ‖P^t(s0, ·) - μ‖_TV)` for `t = 0..=t_max`.
pub fn exact_tv_curve<S: Scalar>(chain: &ExactChain<'_, S>, mu: &Distribution<S>, s0: u64, t_max: u64) -> Vec<(u64, S)> {
    let n = chain.g.n();
    let mut dist = Distribution::point_mass(n, s0);
    let mut curve = Vec::with_capacity(t_max as usize + 1);
    curve.push((0, dist.tv(mu)));
    for t in 1..=t_max {
        dist = Distribution::from_probs(n, chain.step(dist.probs()));
        curve.push((t, dist.tv(mu)));
    }
    curve
}

/// `max_x min{t : ‖P^t(x, ·) - μ‖_TV ≤ eps}`, or `None` when some start does
/// not reach `eps` within `t_max` steps.
pub fn mixing_time<S: Scalar>(chain: &ExactChain<'_, S>, mu: &Distribution<S>, eps: &S, t_max: u64) -> Option<u64> {
    let n = chain.g.n();
    let mut worst = 0;
    for x in 0u64..1 << n {
        let mut dist = Distribution::point_mass(n, x);
        let mut t = 0;
        while dist.tv(mu) > *eps {
            if t == t_max {
                return None;
            }
            dist = Distribution::from_probs(n, chain.step(dist.probs()));
            t += 1;
        }
        worst = worst.max(t);
    }
    Some(worst)
}
