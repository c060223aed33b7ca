use rand::Rng;
use serde_json::{json, Value};

use super::{nu_decision_tree, sample_nu, DefectRule, PolymerSystem, RestrictedZMode, SamplerConfig, ZMethod};
use crate::budget::Budget;
use crate::cluster::{compute_L, xi_exact, ClusterTruncation, K0Selection, K0Variant};
use crate::error::{check_budget, Error, Result};
use crate::graphs::{BipartiteGraph, Side, VertexSet};
use crate::model::{gibbs_exact, induced_edge_table, partition_exact, Distribution, IsingParams};
use crate::numeric::Scalar;
use crate::polymer::{recover_configuration, PolymerConfiguration};

/// `P(D = Odd)` from the two side weights.
pub fn defect_side_probability<S: Scalar>(w_odd: &S, w_even: &S) -> Result<S> {
    if *w_odd < S::zero() || *w_even < S::zero() {
        return Err(Error::DegenerateWeights(format!("negative weight (odd {w_odd}, even {w_even})")));
    }
    let total = w_odd.clone() + w_even.clone();
    if total.is_zero() {
        return Err(Error::DegenerateWeights("both weights are zero".into()));
    }
    Ok(w_odd.clone() / total)
}

pub fn sample_defect_side<S: Scalar, R: Rng>(w_odd: &S, w_even: &S, rng: &mut R) -> Result<Side> {
    let p_odd = defect_side_probability(w_odd, w_even)?.as_f64();
    Ok(if rng.gen::<f64>() < p_odd { Side::Odd } else { Side::Even })
}

fn side_index(side: Side) -> usize {
    match side {
        Side::Odd => 0,
        Side::Even => 1,
    }
}

enum Branch<S> {
    BruteForce(Distribution<S>),
    Cluster {
        p_odd: S,
        systems: [PolymerSystem<S>; 2],
        method: ZMethod,
    },
}

/// The Ising sampler with its per-graph precomputation done once.
pub struct IsingSampler<'g, S> {
    g: &'g BipartiteGraph,
    p: IsingParams<S>,
    budget: Budget,
    branch: Branch<S>,
    selection: Option<K0Selection>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsingSample {
    pub set: VertexSet,
    pub defect_side: Option<Side>,
    pub configuration: Option<PolymerConfiguration>,
}

fn defect_weights<S: Scalar>(g: &BipartiteGraph, p: &IsingParams<S>, rule: DefectRule, k: usize, budget: &Budget) -> Result<[S; 2]> {
    let weight = |side| -> Result<S> {
        match rule {
            DefectRule::TruncatedLinear => Ok(compute_L(g, side, k, p, budget)?.value),
            DefectRule::TruncatedExp => compute_L(g, side, k, p, budget)?
                .value
                .exp()
                .ok_or(Error::NeedsFloat("the exponential defect rule")),
            DefectRule::ExactXi => xi_exact(g, side, p, budget),
        }
    };
    Ok([weight(Side::Odd)?, weight(Side::Even)?])
}

impl<'g, S: Scalar> IsingSampler<'g, S> {
    pub fn new(g: &'g BipartiteGraph, p: &IsingParams<S>, cfg: &SamplerConfig, budget: &Budget) -> Result<Self> {
        cfg.validate()?;
        let eps0 = cfg.tail_inputs(g, p).epsilon0();
        if cfg.allow_brute_force && cfg.epsilon <= eps0 {
            return Ok(IsingSampler {
                g,
                p: p.clone(),
                budget: budget.clone(),
                branch: Branch::BruteForce(gibbs_exact(g, p, budget)?),
                selection: None,
            });
        }
        let (k, selection) = cfg.k0(g, p, K0Variant::PartitionFunction)?;
        let (max_size, method) = match cfg.mode {
            RestrictedZMode::ExactRestrictedZ => (None, ZMethod::Exact),
            RestrictedZMode::TruncatedRestrictedZ => {
                let (k_restricted, _) = cfg.k0(g, p, K0Variant::Restricted)?;
                (Some(k), ZMethod::Truncated { k: k_restricted })
            }
        };
        let [w_odd, w_even] = defect_weights(g, p, cfg.defect_rule, k, budget)?;
        let p_odd = defect_side_probability(&w_odd, &w_even)?;
        let systems = [
            PolymerSystem::new(g, Side::Odd, p, max_size, budget)?,
            PolymerSystem::new(g, Side::Even, p, max_size, budget)?,
        ];
        Ok(IsingSampler {
            g,
            p: p.clone(),
            budget: budget.clone(),
            branch: Branch::Cluster { p_odd, systems, method },
            selection: Some(selection),
        })
    }

    pub fn is_brute_force(&self) -> bool {
        matches!(self.branch, Branch::BruteForce(_))
    }

    pub fn selection(&self) -> Option<&K0Selection> {
        self.selection.as_ref()
    }

    fn occupation_f64(&self) -> f64 {
        self.p.occupation().as_f64()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<IsingSample> {
        let n = self.g.n();
        match &self.branch {
            Branch::BruteForce(mu) => {
                let mut u = rng.gen::<f64>();
                let mut state = (1u64 << n) - 1;
                for (m, prob) in mu.probs().iter().enumerate() {
                    let pr = prob.as_f64();
                    if u < pr {
                        state = m as u64;
                        break;
                    }
                    u -= pr;
                }
                Ok(IsingSample {
                    set: VertexSet::from_mask(n, state),
                    defect_side: None,
                    configuration: None,
                })
            }
            Branch::Cluster { p_odd, systems, method } => {
                let side = if rng.gen::<f64>() < p_odd.as_f64() { Side::Odd } else { Side::Even };
                let sys = &systems[side_index(side)];
                let config = sample_nu(self.g, sys, &self.p, *method, &self.budget, rng)?;
                let mut set = config.support(n);
                let blocked = config.covered_neighborhood(n);
                let coin = self.occupation_f64();
                for v in self.g.side_vertices(side.other()) {
                    if !blocked.contains(v) && rng.gen::<f64>() < coin {
                        set.insert(v);
                    }
                }
                Ok(IsingSample {
                    set,
                    defect_side: Some(side),
                    configuration: Some(config),
                })
            }
        }
    }

    /// The exact output distribution, from the decision tree of every
    /// random choice the sampler makes.
    pub fn exact_distribution(&self) -> Result<Distribution<S>> {
        let n = self.g.n();
        check_budget("vertex count for exact sampler distributions", n as u64, self.budget.state_space_vertices as u64)?;
        let (p_odd, systems, method) = match &self.branch {
            Branch::BruteForce(mu) => return Ok(mu.clone()),
            Branch::Cluster { p_odd, systems, method } => (p_odd, systems, method),
        };
        let mut probs = vec![S::zero(); 1 << n];
        let on = self.p.occupation();
        let off = S::one() - on.clone();
        for side in Side::BOTH {
            let p_side = if side == Side::Odd { p_odd.clone() } else { S::one() - p_odd.clone() };
            let leaves = nu_decision_tree(self.g, &systems[side_index(side)], &self.p, *method, &self.budget)?;
            for (config, w) in leaves {
                let base = config.support(n).to_mask().expect("mask range");
                let blocked = config.covered_neighborhood(n);
                let free: Vec<usize> = self
                    .g
                    .side_vertices(side.other())
                    .into_iter()
                    .filter(|&v| !blocked.contains(v))
                    .collect();
                let lead = p_side.clone() * w;
                for coins in 0u64..1 << free.len() {
                    let k = coins.count_ones();
                    let mut mask = base;
                    for (i, &v) in free.iter().enumerate() {
                        if coins >> i & 1 == 1 {
                            mask |= 1 << v;
                        }
                    }
                    let pr = lead.clone() * on.powu(k) * off.powu(free.len() as u32 - k);
                    probs[mask as usize] = probs[mask as usize].clone() + pr;
                }
            }
        }
        Ok(Distribution::from_probs(n, probs))
    }
}

pub fn sample_ising<S: Scalar, R: Rng>(
    g: &BipartiteGraph,
    p: &IsingParams<S>,
    cfg: &SamplerConfig,
    budget: &Budget,
    rng: &mut R,
) -> Result<IsingSample> {
    IsingSampler::new(g, p, cfg, budget)?.sample(rng)
}

#[derive(Clone, Debug)]
pub struct ApproxZReport<S> {
    /// `(1+λ)^{n/2}(e^{L_E} + e^{L_O})`, or the exact value on the
    /// brute-force branch.
    pub z_hat: S,
    /// `(1+λ)^{n/2}(L_E + L_O)`.
    pub z_hat_linear: Option<S>,
    pub l_even: Option<ClusterTruncation<S>>,
    pub l_odd: Option<ClusterTruncation<S>>,
    pub k0: Option<usize>,
    pub selection: Option<K0Selection>,
    pub flags: Vec<String>,
    pub exact_z: Option<S>,
    pub rel_err: Option<f64>,
    pub rel_err_linear: Option<f64>,
}

impl<S: Scalar> ApproxZReport<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "Z_hat": self.z_hat.to_json(),
            "Z_hat_linear": self.z_hat_linear.as_ref().map(Scalar::to_json),
            "L_E": self.l_even.as_ref().map(ClusterTruncation::to_json),
            "L_O": self.l_odd.as_ref().map(ClusterTruncation::to_json),
            "k0": self.k0,
            "k0_selection": self.selection,
            "flags": self.flags,
            "exact_Z": self.exact_z.as_ref().map(Scalar::to_json),
            "rel_err": self.rel_err,
            "rel_err_linear": self.rel_err_linear,
        })
    }
}

fn relative_error<S: Scalar>(approx: &S, exact: &S) -> f64 {
    ((approx.clone() - exact.clone()) / exact.clone()).abs().as_f64()
}

/// `Ẑ` from the truncated expansions of both sides. The exact partition
/// function and relative errors are included when `n ≤ 20` and the budget
/// allows it.
#[allow(non_snake_case)]
pub fn approx_Z<S: Scalar>(g: &BipartiteGraph, p: &IsingParams<S>, cfg: &SamplerConfig, budget: &Budget) -> Result<ApproxZReport<S>> {
    cfg.validate()?;
    let exact = if g.n() <= 20 {
        match partition_exact(g, p, budget) {
            Ok(z) => Some(z),
            Err(e) if e.is_budget() => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let mut flags = Vec::new();
    let eps0 = cfg.tail_inputs(g, p).epsilon0();
    if cfg.allow_brute_force && cfg.epsilon <= eps0 {
        flags.push("brute_force".to_string());
        let z = match &exact {
            Some(z) => z.clone(),
            None => partition_exact(g, p, budget)?,
        };
        return Ok(ApproxZReport {
            rel_err: Some(0.0),
            z_hat: z.clone(),
            exact_z: Some(z),
            z_hat_linear: None,
            l_even: None,
            l_odd: None,
            k0: None,
            selection: None,
            flags,
            rel_err_linear: None,
        });
    }
    let (k, selection) = cfg.k0(g, p, K0Variant::PartitionFunction)?;
    if cfg.k_override.is_some() {
        flags.push("k_override".to_string());
    }
    if !selection.certified {
        flags.push("k0_not_certified".to_string());
    }
    flags.push("asymptotic_guarantee_only".to_string());
    let l_even = compute_L(g, Side::Even, k, p, budget)?;
    let l_odd = compute_L(g, Side::Odd, k, p, budget)?;
    let free = (S::one() + p.lambda().clone()).powu((g.n() / 2) as u32);
    let exp = |x: &S| x.exp().ok_or(Error::NeedsFloat("the partition function approximation"));
    let z_hat = free.clone() * (exp(&l_even.value)? + exp(&l_odd.value)?);
    let z_hat_linear = free * (l_even.value.clone() + l_odd.value.clone());
    Ok(ApproxZReport {
        rel_err: exact.as_ref().map(|z| relative_error(&z_hat, z)),
        rel_err_linear: exact.as_ref().map(|z| relative_error(&z_hat_linear, z)),
        z_hat,
        z_hat_linear: Some(z_hat_linear),
        l_even: Some(l_even),
        l_odd: Some(l_odd),
        k0: Some(k),
        selection: Some(selection),
        flags,
        exact_z: exact,
    })
}

#[derive(Clone, Debug)]
pub struct MuHatReport<S> {
    pub mu_hat: Distribution<S>,
    /// `Σ_S ŵ(S)`.
    pub total_weight: S,
    /// `‖μ̂ - μ‖_TV`.
    pub tv: S,
}

/// `μ̂(S) ∝ ŵ(S) = Σ_D 1[Θ̂_D(S) ∈ Ω_D] λ^{|S|} q^{|E(S)|}` over all subsets.
pub fn mu_hat_exact<S: Scalar>(g: &BipartiteGraph, p: &IsingParams<S>, budget: &Budget) -> Result<MuHatReport<S>> {
    let n = g.n();
    let edges = induced_edge_table(g, budget)?;
    let weights: Vec<S> = (0u64..1 << n)
        .map(|m| {
            let s = VertexSet::from_mask(n, m);
            let accepted = Side::BOTH
                .iter()
                .filter(|&&side| recover_configuration(g, &s, side).is_some())
                .count();
            if accepted == 0 {
                S::zero()
            } else {
                S::from_u64(accepted as u64) * p.lambda().powu(m.count_ones()) * p.q().powu(edges[m as usize] as u32)
            }
        })
        .collect();
    let total_weight = S::sum_all(weights.iter().cloned());
    let mu_hat = Distribution::from_weights(n, weights);
    let tv = mu_hat.tv(&gibbs_exact(g, p, budget)?);
    Ok(MuHatReport { mu_hat, total_weight, tv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::generate_graph;
    use crate::numeric::Rational;
    use crate::rng::stream_rng;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn cluster_cfg(k: usize) -> SamplerConfig {
        SamplerConfig {
            k_override: Some(k),
            allow_brute_force: false,
            ..SamplerConfig::new(0.5, 7)
        }
    }

    #[test]
    fn defect_side_examples() {
        assert_eq!(defect_side_probability(&r(1, 1), &r(1, 1)).unwrap(), r(1, 2));
        assert_eq!(defect_side_probability(&r(3, 1), &r(0, 1)).unwrap(), r(1, 1));
        assert!(defect_side_probability(&r(0, 1), &r(0, 1)).is_err());
        let mut rng = stream_rng(0, 0);
        for _ in 0..50 {
            assert_eq!(sample_defect_side(&1.0, &0.0, &mut rng).unwrap(), Side::Odd);
        }
    }

    #[test]
    fn empty_weight_is_two() {
        let g = generate_graph("hypercube:3").unwrap();
        let p = IsingParams::new(r(1, 1), r(3, 10)).unwrap();
        let rep = mu_hat_exact(&g, &p, &Budget::default()).unwrap();
        assert_eq!(rep.mu_hat.probs()[0].clone() * rep.total_weight.clone(), r(2, 1));
    }

    #[test]
    fn weight_identity_on_c4_and_q3() {
        let b = Budget::default();
        for spec in ["cycle:4", "hypercube:3"] {
            let g = generate_graph(spec).unwrap();
            let p = IsingParams::new(r(2, 3), r(1, 4)).unwrap();
            let rep = mu_hat_exact(&g, &p, &b).unwrap();
            let xi = xi_exact(&g, Side::Odd, &p, &b).unwrap() + xi_exact(&g, Side::Even, &p, &b).unwrap();
            let free = (r(1, 1) + p.lambda().clone()).pow((g.n() / 2) as i32);
            assert_eq!(rep.total_weight, free * xi);
        }
    }

    #[test]
    fn c4_negative_control() {
        let g = generate_graph("cycle:4").unwrap();
        let p = IsingParams::new(1.0, 0.5).unwrap();
        let rep = approx_Z(&g, &p, &cluster_cfg(3), &Budget::default()).unwrap();
        assert_eq!(rep.z_hat, 8.0);
        assert_eq!(rep.z_hat_linear, Some(0.0));
        let z = 7.0 + 4.0 * 0.5 + 4.0 * 0.25 + 0.0625;
        assert_eq!(rep.exact_z, Some(z));
        assert!((rep.rel_err.unwrap() - (8.0 - z).abs() / z).abs() < 1e-15);
        assert!(rep.flags.contains(&"k_override".to_string()));
    }

    #[test]
    fn sampler_distribution_equals_mu_hat_on_q3() {
        let g = generate_graph("hypercube:3").unwrap();
        let b = Budget::default();
        let p = IsingParams::new(r(1, 1), r(3, 10)).unwrap();
        let cfg = SamplerConfig {
            defect_rule: DefectRule::ExactXi,
            ..cluster_cfg(2)
        };
        let sampler = IsingSampler::new(&g, &p, &cfg, &b).unwrap();
        assert!(!sampler.is_brute_force());
        let dist = sampler.exact_distribution().unwrap();
        assert_eq!(dist, mu_hat_exact(&g, &p, &b).unwrap().mu_hat);
    }

    #[test]
    fn brute_force_branch_below_epsilon0() {
        let g = generate_graph("hypercube:3").unwrap();
        let b = Budget::default();
        let p = IsingParams::new(1.0, 0.3).unwrap();
        let cfg = SamplerConfig::new(0.5, 1);
        let sampler = IsingSampler::new(&g, &p, &cfg, &b).unwrap();
        assert!(sampler.is_brute_force());
        assert_eq!(sampler.exact_distribution().unwrap(), gibbs_exact(&g, &p, &b).unwrap());
        let rep = approx_Z(&g, &p, &cfg, &b).unwrap();
        assert_eq!(rep.flags, vec!["brute_force".to_string()]);
    }

    #[test]
    fn samples_are_reproducible_and_consistent() {
        let g = generate_graph("hypercube:3").unwrap();
        let b = Budget::default();
        let p = IsingParams::new(1.0, 0.3).unwrap();
        let sampler = IsingSampler::new(&g, &p, &cluster_cfg(2), &b).unwrap();
        let draw = |seed| {
            let mut rng = stream_rng(seed, 0);
            (0..20).map(|_| sampler.sample(&mut rng).unwrap()).collect::<Vec<_>>()
        };
        let a = draw(3);
        assert_eq!(a, draw(3));
        for s in &a {
            let side = s.defect_side.unwrap();
            let cfg = s.configuration.as_ref().unwrap();
            assert_eq!(recover_configuration(&g, &s.set, side).as_ref(), Some(cfg));
        }
    }
}
