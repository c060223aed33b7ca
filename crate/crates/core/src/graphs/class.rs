use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::{for_each_connected_set, BipartiteGraph, Side, VertexSet};
use crate::numeric::Rational;

// Cap on the number of connected sets visited per condition before the check
// is reported as skipped.
const WORK_LIMIT: u64 = 20_000_000;

/// Outcome of an exhaustive expansion check.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ExpansionCheck {
    /// Every set up to `up_to` vertices satisfies the bound, and `up_to`
    /// covers all sizes the condition asks for.
    Verified { up_to: usize },
    /// A concrete set whose neighborhood is below the required size.
    Violated {
        witness: VertexSet,
        neighborhood_size: usize,
        set_size: usize,
    },
    /// Sets up to `checked_up_to` pass, larger sets up to `required_up_to`
    /// were not examined.
    Skipped {
        checked_up_to: usize,
        required_up_to: usize,
    },
}

impl ExpansionCheck {
    pub fn is_verified(&self) -> bool {
        matches!(self, ExpansionCheck::Verified { .. })
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, ExpansionCheck::Violated { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub graph: String,
    pub n: usize,
    pub d: usize,
    pub delta2: usize,
    pub kappa: String,
    pub max_codegree: usize,
    pub codegree_ok: bool,
    /// Strict expansion `|N(X)| > |X|` for one-sided `X` with `|X| <= 3n/8`.
    pub expansion: ExpansionCheck,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub expansion_ratio_min: Option<Rational>,
    /// Smallest `(|N(X)|/|X| - 1) d^kappa` among checked sets.
    pub worst_scaled_ratio: Option<f64>,
    /// `|N(X)| >= sqrt(d) |X|` for one-sided `X` with `|X| <= d^3 ln n`.
    pub h_prime: ExpansionCheck,
    /// `n / (d^6 ln d)`, undefined for `d = 1`.
    pub size_ratio: Option<f64>,
}

fn ser_opt_ratio<S: serde::Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// Checks the codegree and expansion conditions of the expander classes.
///
/// Expansion is checked on 2-linked sets only. Both bounds are linear in
/// `(|N(X)|, |X|)` and neighborhoods of distinct 2-linked components are
/// disjoint, so a set violates a bound only if one of its components does.
pub fn validate_class(g: &BipartiteGraph, delta2: usize, kappa: &Rational, budget: usize) -> ClassReport {
    let n = g.n();
    let d = g.degree();
    let side = g.side_size();

    let max_codegree = (0..n)
        .flat_map(|v| g.square_neighbors(v).iter().map(move |&u| (u, v)))
        .filter(|&(u, v)| u > v)
        .map(|(u, v)| g.codegree(u, v))
        .max()
        .unwrap_or(0);

    let required2 = (3 * n).div_ceil(8).min(side);
    let required4 = ((d as f64).powi(3) * (n as f64).ln()).floor().max(0.0) as usize;
    let required4 = required4.min(side);

    let mut ratio_min: Option<(usize, usize)> = None;
    let expansion = check(g, required2, budget, |nb, x| nb > x, |nb, x| {
        if ratio_min.map_or(true, |(rn, rx)| nb * rx < rn * x) {
            ratio_min = Some((nb, x));
        }
    });
    let h_prime = check(g, required4, budget, |nb, x| nb * nb >= d * x * x, |_, _| {});

    let expansion_ratio_min = ratio_min.map(|(nb, x)| Rational::new(BigInt::from(nb), BigInt::from(x)));
    let kappa_f = kappa.to_f64().unwrap_or(f64::NAN);
    let worst_scaled_ratio = ratio_min.map(|(nb, x)| (nb as f64 / x as f64 - 1.0) * (d as f64).powf(kappa_f));
    let size_ratio = (d > 1).then(|| n as f64 / ((d as f64).powi(6) * (d as f64).ln()));

    ClassReport {
        graph: g.name().to_string(),
        n,
        d,
        delta2,
        kappa: kappa.to_string(),
        max_codegree,
        codegree_ok: max_codegree <= delta2,
        expansion,
        expansion_ratio_min,
        worst_scaled_ratio,
        h_prime,
        size_ratio,
    }
}

/// Iterative deepening over set sizes so that a partial check still
/// certifies every size below the one that ran out of work.
fn check(
    g: &BipartiteGraph,
    required: usize,
    budget: usize,
    holds: impl Fn(usize, usize) -> bool,
    mut observe: impl FnMut(usize, usize),
) -> ExpansionCheck {
    let limit = required.min(budget);
    let mut work = 0u64;
    for size in 1..=limit {
        let mut violation: Option<(Vec<usize>, usize)> = None;
        let mut complete = true;
        'sides: for s in Side::BOTH {
            for root in g.side_vertices(s) {
                complete = for_each_connected_set(g.n(), |u| g.square_neighbors(u), root, size, true, |set| {
                    work += 1;
                    if work > WORK_LIMIT {
                        return false;
                    }
                    if set.len() == size {
                        let nb = neighborhood_size(g, set);
                        observe(nb, size);
                        if !holds(nb, size) {
                            violation = Some((set.to_vec(), nb));
                            return false;
                        }
                    }
                    true
                });
                if !complete {
                    break 'sides;
                }
            }
        }
        if let Some((members, nb)) = violation {
            return ExpansionCheck::Violated {
                witness: VertexSet::from_vertices(g.n(), members),
                neighborhood_size: nb,
                set_size: size,
            };
        }
        if !complete {
            return ExpansionCheck::Skipped {
                checked_up_to: size - 1,
                required_up_to: required,
            };
        }
    }
    if limit < required {
        ExpansionCheck::Skipped {
            checked_up_to: limit,
            required_up_to: required,
        }
    } else {
        ExpansionCheck::Verified { up_to: required }
    }
}

fn neighborhood_size(g: &BipartiteGraph, set: &[usize]) -> usize {
    let mut seen = VertexSet::empty(g.n());
    let mut count = 0;
    for &v in set {
        for &u in g.neighbors(v) {
            if seen.insert(u) {
                count += 1;
            }
        }
    }
    count
}
