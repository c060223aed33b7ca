//! Antiferromagnetic Ising model on bipartite regular expanders: exact
//! oracles, Glauber dynamics diagnostics, and the polymer-model sampler and
//! partition-function approximation.

pub mod budget;
pub mod cluster;
pub mod error;
pub mod graphs;
pub mod mcmc;
pub mod model;
pub mod numeric;
pub mod polymer;
pub mod rng;
pub mod sampler;

pub use budget::Budget;
pub use error::{Error, Result};
pub use graphs::{BipartiteGraph, Side, VertexSet};
pub use numeric::{LogWeight, Rational, Scalar};
