//! Ising weights, exact partition functions and Gibbs measures.

mod classical;
mod exact;
mod percolation;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{BipartiteGraph, VertexSet};
use crate::numeric::{convert, Rational, Scalar};

pub use classical::{classical_log_weight, classical_params, ClassicalParams};
pub use exact::{
    gibbs_exact, induced_edge_table, partition_exact, DensityOfStates, Distribution,
};
pub use percolation::{independence_polynomial, independent_set_counts, percolation_expectation};

/// Fugacity `λ` and edge factor `q = e^{-β}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsingParams<S> {
    lambda: S,
    q: S,
}

impl<S: Scalar> IsingParams<S> {
    pub fn new(lambda: S, q: S) -> Result<Self> {
        if !(lambda > S::zero()) {
            return Err(Error::InvalidParams(format!("lambda must be positive, got {lambda}")));
        }
        if !(q >= S::zero() && q <= S::one()) {
            return Err(Error::InvalidParams(format!("q must lie in [0, 1], got {q}")));
        }
        Ok(IsingParams { lambda, q })
    }

    pub fn lambda(&self) -> &S {
        &self.lambda
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    /// Percolation retention probability `1 - q`.
    pub fn p(&self) -> S {
        S::one() - self.q.clone()
    }

    /// `α = λ(1 - q)`.
    pub fn alpha(&self) -> S {
        self.lambda.clone() * self.p()
    }

    pub fn is_hard_core(&self) -> bool {
        self.q.is_zero()
    }

    /// Probability `λ/(1+λ)` of a free vertex being occupied.
    pub fn occupation(&self) -> S {
        self.lambda.clone() / (S::one() + self.lambda.clone())
    }

    /// Probability that Glauber dynamics adds a vertex with `j` occupied
    /// neighbors.
    pub fn add_probability(&self, j: usize) -> S {
        let w = self.lambda.clone() * self.q.powu(j as u32);
        w.clone() / (S::one() + w)
    }
}

impl IsingParams<Rational> {
    pub fn to_mode<T: Scalar>(&self) -> IsingParams<T> {
        IsingParams {
            lambda: convert(&self.lambda),
            q: convert(&self.q),
        }
    }
}

impl IsingParams<f64> {
    /// Builds float parameters from an inverse temperature `β >= 0`.
    pub fn from_beta(lambda: f64, beta: f64) -> Result<Self> {
        if !(beta >= 0.0) {
            return Err(Error::InvalidParams(format!("beta must be nonnegative, got {beta}")));
        }
        IsingParams::new(lambda, (-beta).exp())
    }
}

/// `ω̃(S) = λ^{|S|} q^{|E(S)|}`.
pub fn config_weight<S: Scalar>(g: &BipartiteGraph, s: &VertexSet, p: &IsingParams<S>) -> S {
    p.lambda.powu(s.len() as u32) * p.q.powu(g.induced_edges(s) as u32)
}
