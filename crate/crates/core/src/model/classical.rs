use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{BipartiteGraph, VertexSet};

/// Coupling, field and per-vertex log-shift of the equivalent ±1-spin model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassicalParams {
    pub j: f64,
    pub h: f64,
    pub shift: f64,
}

/// `J = -β/4`, `h = ln(λ)/2 - βd/4` and `shift = βd/8 - ln(λ)/2`, so that
/// `ln ω̃(S) = J Σ_{uv} σ_u σ_v + h Σ_v σ_v - shift·n` with `σ_v = ±1`.
pub fn classical_params(lambda: f64, beta: f64, d: usize) -> Result<ClassicalParams> {
    if !(lambda > 0.0) || !beta.is_finite() || d == 0 {
        return Err(Error::InvalidParams(format!(
            "classical parameters need lambda > 0, finite beta, d >= 1 (got {lambda}, {beta}, {d})"
        )));
    }
    let d = d as f64;
    Ok(ClassicalParams {
        j: -beta / 4.0,
        h: lambda.ln() / 2.0 - beta * d / 4.0,
        shift: beta * d / 8.0 - lambda.ln() / 2.0,
    })
}

/// `J Σ_{uv∈E} σ_u σ_v + h Σ_v σ_v` with `σ_v = 2·1[v∈S] - 1`.
pub fn classical_log_weight(g: &BipartiteGraph, s: &VertexSet, c: &ClassicalParams) -> f64 {
    let spin = |v: usize| if s.contains(v) { 1.0 } else { -1.0 };
    let pair: f64 = g.edges().map(|(u, v)| spin(u) * spin(v)).sum();
    let field: f64 = (0..g.n()).map(spin).sum();
    c.j * pair + c.h * field
}
