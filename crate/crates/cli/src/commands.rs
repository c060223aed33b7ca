use std::any::Any;
use std::fs;
use std::path::Path;

use expander_ising::cluster::{compute_L, xi_exact};
use expander_ising::graphs::{generate_graph, validate_class};
use expander_ising::mcmc::{conductance_exact, exact_tv_curve, mixing_time, parse_automorphism, ChainKind, ExactChain, MixingReport};
use expander_ising::model::{gibbs_exact, partition_exact, percolation_expectation, IsingParams};
use expander_ising::numeric::{convert, parse_rational, LogWeight};
use expander_ising::rng::stream_rng;
use expander_ising::sampler::{approx_Z, DefectRule, IsingSampler, RestrictedZMode, SamplerConfig};
use expander_ising::{BipartiteGraph, Budget, Error, Rational, Result, Scalar, Side, VertexSet};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{json_text, write_text, Artifacts, RunManifest};
use crate::{Chain, Cli, Command, ModelArgs, Numeric, OutArgs, Rule, SamplerArgs, SideArg, ZMode};

pub const BUDGET_ENV: &str = "EXPANDER_ISING_BUDGET";

macro_rules! by_numeric {
    ($numeric:expr, $f:ident($($arg:expr),*)) => {
        match $numeric {
            Numeric::Rational => $f::<Rational>($($arg),*),
            Numeric::Float => $f::<f64>($($arg),*),
            Numeric::Log => $f::<LogWeight>($($arg),*),
        }
    };
}

fn budget() -> Result<Budget> {
    match std::env::var(BUDGET_ENV) {
        Ok(text) => Budget::default().with_overrides(&text),
        Err(_) => Ok(Budget::default()),
    }
}

fn ci_mode() -> bool {
    std::env::var("CI").is_ok_and(|v| !v.is_empty() && v != "0" && v != "false")
}

fn numeric_for(model: &ModelArgs, default: Numeric) -> Result<Numeric> {
    match (model.beta, model.numeric) {
        (Some(_), Some(n)) if n != Numeric::Float => Err(Error::InvalidParams("--beta is only accepted with --numeric float".into())),
        (Some(_), _) => Ok(Numeric::Float),
        (None, n) => Ok(n.unwrap_or(default)),
    }
}

fn params<S: Scalar>(model: &ModelArgs) -> Result<IsingParams<S>> {
    let lambda = parse_rational(&model.lambda)?;
    match (&model.q, model.beta) {
        (Some(q), None) => IsingParams::new(convert(&lambda), convert(&parse_rational(q)?)),
        (None, Some(beta)) => {
            let p = IsingParams::<f64>::from_beta(convert(&lambda), beta)?;
            (&p as &dyn Any)
                .downcast_ref::<IsingParams<S>>()
                .cloned()
                .ok_or_else(|| Error::InvalidParams("--beta is only accepted with --numeric float".into()))
        }
        _ => Err(Error::InvalidParams("give exactly one of --q and --beta".into())),
    }
}

fn manifest_for(sub: &str, graph: &str, model: &ModelArgs, numeric: Numeric) -> RunManifest {
    let mut m = RunManifest::new(sub, graph);
    m.lambda = Some(model.lambda.clone());
    m.q = model.q.clone();
    m.beta = model.beta;
    m.flag("numeric", numeric);
    m
}

fn setup_threads(requested: Option<usize>, numeric: Option<Numeric>) -> usize {
    let threads = if numeric == Some(Numeric::Rational) {
        1
    } else {
        requested.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    };
    // A second build in the same process only fails if a pool already exists.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    threads
}

fn sampler_config(args: &SamplerArgs, seed: u64, mode: RestrictedZMode) -> SamplerConfig {
    let mut cfg = SamplerConfig::new(args.epsilon, seed);
    cfg.mode = mode;
    cfg.k_override = args.k;
    cfg.defect_rule = match args.defect_rule {
        Rule::TruncatedLinear => DefectRule::TruncatedLinear,
        Rule::TruncatedExp => DefectRule::TruncatedExp,
        Rule::ExactXi => DefectRule::ExactXi,
    };
    cfg.allow_brute_force = !args.no_brute_force;
    cfg.kappa = args.kappa;
    cfg.delta2 = args.delta2;
    cfg
}

fn sampler_flags(m: &mut RunManifest, cfg: &SamplerConfig) {
    m.flag("epsilon", cfg.epsilon);
    m.flag("k", cfg.k_override);
    m.flag("defect_rule", cfg.defect_rule);
    m.flag("restricted_z", cfg.mode);
    m.flag("allow_brute_force", cfg.allow_brute_force);
    m.flag("kappa", cfg.kappa);
    m.flag("delta2", cfg.delta2);
}

fn print_json(value: &Value) {
    print!("{}", json_text(value));
}

pub fn run(cli: Cli) -> Result<()> {
    let budget = budget()?;
    let requested = cli.threads;
    match cli.command {
        Command::Gen { graph, out } => {
            let threads = setup_threads(requested, None);
            let g = generate_graph(&graph.graph)?;
            let path = Path::new(&out);
            write_text(path, &g.to_edge_list())?;
            let mut m = RunManifest::new("gen", &graph.graph);
            m.threads = threads;
            let mut arts = Artifacts::new(None, m);
            arts.record(path);
            println!("{}", path.display());
            arts.finish(Some(path))
        }
        Command::Validate { graph, delta2, kappa, out } => {
            let threads = setup_threads(requested, None);
            let g = generate_graph(&graph.graph)?;
            let kappa_r = parse_rational(&kappa)?;
            let report = validate_class(&g, delta2, &kappa_r, budget.expansion_subset_size);
            let mut m = RunManifest::new("validate", &graph.graph);
            m.threads = threads;
            m.flag("delta2", delta2);
            m.flag("kappa", &kappa);
            let value = serde_json::to_value(&report).expect("class report serializes");
            print_json(&value);
            let mut arts = Artifacts::new(out.out_dir.as_deref(), m);
            arts.json("class_report.json", &value)?;
            arts.finish(None)?;
            if !report.codegree_ok || report.expansion.is_violated() || report.h_prime.is_violated() {
                return Err(Error::InvalidGraph(format!("{} violates the class conditions", g.name())));
            }
            Ok(())
        }
        Command::ExactZ { graph, model, out } => {
            let numeric = numeric_for(&model, Numeric::Rational)?;
            let threads = setup_threads(requested, Some(numeric));
            let g = generate_graph(&graph.graph)?;
            let mut m = manifest_for("exact-z", &graph.graph, &model, numeric);
            m.threads = threads;
            by_numeric!(numeric, exact_z(&g, &model, &budget, m, &out))
        }
        Command::ApproxZ { graph, model, sampler, out } => {
            let numeric = numeric_for(&model, Numeric::Float)?;
            let threads = setup_threads(requested, Some(numeric));
            let g = generate_graph(&graph.graph)?;
            let cfg = sampler_config(&sampler, 0, RestrictedZMode::ExactRestrictedZ);
            let mut m = manifest_for("approx-z", &graph.graph, &model, numeric);
            m.threads = threads;
            sampler_flags(&mut m, &cfg);
            by_numeric!(numeric, approx_z(&g, &model, &cfg, &budget, m, &out))
        }
        Command::Sample { graph, model, sampler, count, seed, mode, out } => {
            if seed.is_none() && ci_mode() {
                return Err(Error::InvalidParams("--seed is required when CI is set".into()));
            }
            let seed = seed.unwrap_or(0);
            let numeric = numeric_for(&model, Numeric::Float)?;
            let threads = setup_threads(requested, Some(numeric));
            let g = generate_graph(&graph.graph)?;
            let mode = match mode {
                ZMode::Exact => RestrictedZMode::ExactRestrictedZ,
                ZMode::Truncated => RestrictedZMode::TruncatedRestrictedZ,
            };
            let cfg = sampler_config(&sampler, seed, mode);
            let mut m = manifest_for("sample", &graph.graph, &model, numeric);
            m.threads = threads;
            m.seed = Some(seed);
            m.flag("count", count);
            sampler_flags(&mut m, &cfg);
            by_numeric!(numeric, sample(&g, &model, &cfg, count, &budget, m, &out))
        }
        Command::Mix { graph, model, chain, flip, t_max, start, mixing_eps, out } => {
            let numeric = numeric_for(&model, Numeric::Float)?;
            let threads = setup_threads(requested, Some(numeric));
            let g = generate_graph(&graph.graph)?;
            let flip = match &flip {
                Some(path) => Some(parse_automorphism(&fs::read_to_string(path)?, g.n())?),
                None => None,
            };
            let mut m = manifest_for("mix", &graph.graph, &model, numeric);
            m.threads = threads;
            m.flag("chain", chain);
            m.flag("flip", &flip);
            m.flag("t_max", t_max);
            m.flag("start", &start);
            m.flag("mixing_eps", &mixing_eps);
            let opts = MixOptions {
                chain,
                flip,
                t_max,
                start,
                mixing_eps,
            };
            by_numeric!(numeric, mix(&g, &model, &opts, &budget, m, &out))
        }
        Command::Conductance { graph, model, out } => {
            let numeric = numeric_for(&model, Numeric::Rational)?;
            let threads = setup_threads(requested, Some(numeric));
            let g = generate_graph(&graph.graph)?;
            let mut m = manifest_for("conductance", &graph.graph, &model, numeric);
            m.threads = threads;
            by_numeric!(numeric, conductance(&g, &model, &budget, m, &out))
        }
        Command::PercolationCheck { graph, lambda, p, numeric, out } => {
            let numeric = numeric.unwrap_or(Numeric::Rational);
            let threads = setup_threads(requested, Some(numeric));
            let g = generate_graph(&graph.graph)?;
            let mut m = RunManifest::new("percolation-check", &graph.graph);
            m.threads = threads;
            m.lambda = Some(lambda.clone());
            m.flag("p", &p);
            m.flag("numeric", numeric);
            by_numeric!(numeric, percolation(&g, &lambda, &p, &budget, m, &out))
        }
        Command::ClusterReport { graph, model, side, k, with_xi, out } => {
            let numeric = numeric_for(&model, Numeric::Rational)?;
            let threads = setup_threads(requested, Some(numeric));
            let g = generate_graph(&graph.graph)?;
            let side = match side {
                SideArg::Even => Side::Even,
                SideArg::Odd => Side::Odd,
            };
            let mut m = manifest_for("cluster-report", &graph.graph, &model, numeric);
            m.threads = threads;
            m.flag("side", side);
            m.flag("k", k);
            m.flag("with_xi", with_xi);
            by_numeric!(numeric, cluster_report(&g, &model, side, k, with_xi, &budget, m, &out))
        }
    }
}

fn exact_z<S: Scalar>(g: &BipartiteGraph, model: &ModelArgs, budget: &Budget, m: RunManifest, out: &OutArgs) -> Result<()> {
    let p = params::<S>(model)?;
    let z = partition_exact(g, &p, budget)?;
    println!("{z}");
    let mut arts = Artifacts::new(out.out_dir.as_deref(), m);
    arts.json("exact_z.json", &json!({ "Z": z.to_json() }))?;
    arts.finish(None)
}

fn approx_z<S: Scalar>(g: &BipartiteGraph, model: &ModelArgs, cfg: &SamplerConfig, budget: &Budget, m: RunManifest, out: &OutArgs) -> Result<()> {
    let p = params::<S>(model)?;
    let report = approx_Z(g, &p, cfg, budget)?.to_json();
    print_json(&report);
    let mut arts = Artifacts::new(out.out_dir.as_deref(), m);
    arts.json("approx_z.json", &report)?;
    arts.finish(None)
}

fn sample<S: Scalar>(
    g: &BipartiteGraph,
    model: &ModelArgs,
    cfg: &SamplerConfig,
    count: usize,
    budget: &Budget,
    m: RunManifest,
    out: &OutArgs,
) -> Result<()> {
    let p = params::<S>(model)?;
    let sampler = IsingSampler::new(g, &p, cfg, budget)?;
    // One stream per sample keeps the output independent of the thread count.
    let sets: Vec<VertexSet> = (0..count as u64)
        .into_par_iter()
        .map(|i| sampler.sample(&mut stream_rng(cfg.seed, i)).map(|s| s.set))
        .collect::<Result<_>>()?;
    let mut text = String::new();
    for s in &sets {
        text.push_str(&serde_json::to_string(&s.to_vec()).expect("vertex lists serialize"));
        text.push('\n');
    }
    let mut arts = Artifacts::new(out.out_dir.as_deref(), m);
    match arts.path("samples.jsonl") {
        Some(path) => {
            write_text(&path, &text)?;
            arts.record(&path);
        }
        None => print!("{text}"),
    }
    arts.finish(None)
}

struct MixOptions {
    chain: Chain,
    flip: Option<Vec<usize>>,
    t_max: u64,
    start: String,
    mixing_eps: Option<String>,
}

fn parse_start(g: &BipartiteGraph, start: &str) -> Result<u64> {
    let set = match start.trim() {
        "empty" => VertexSet::empty(g.n()),
        "even" => g.side_set(Side::Even),
        "odd" => g.side_set(Side::Odd),
        list => {
            let mut vs = Vec::new();
            for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let v: usize = item
                    .parse()
                    .map_err(|_| Error::InvalidParams(format!("start vertex `{item}` is not an index")))?;
                if v >= g.n() {
                    return Err(Error::InvalidParams(format!("start vertex {v} is out of range")));
                }
                vs.push(v);
            }
            VertexSet::from_vertices(g.n(), vs)
        }
    };
    set.to_mask()
        .ok_or_else(|| Error::InvalidParams("start states need at most 64 vertices".into()))
}

fn mix<S: Scalar>(g: &BipartiteGraph, model: &ModelArgs, opts: &MixOptions, budget: &Budget, m: RunManifest, out: &OutArgs) -> Result<()> {
    let p = params::<S>(model)?;
    let kind = match opts.chain {
        Chain::Glauber => ChainKind::Glauber,
        Chain::Flips => ChainKind::GlauberWithFlips,
    };
    let flip = opts.flip.as_deref().or_else(|| g.flip_automorphism());
    let chain = ExactChain::new(g, kind, &p, flip, budget)?;
    let mu = gibbs_exact(g, &p, budget)?;
    let s0 = parse_start(g, &opts.start)?;
    let report = MixingReport {
        tv_curve: exact_tv_curve(&chain, &mu, s0, opts.t_max),
        conductance: conductance_exact(g, &p, budget)?,
    };
    let tau = match &opts.mixing_eps {
        Some(eps) => {
            let eps: S = convert(&parse_rational(eps)?);
            Some(mixing_time(&chain, &mu, &eps, opts.t_max))
        }
        None => None,
    };
    let mut value = report.to_json();
    value["chain"] = json!(opts.chain);
    value["start"] = json!(opts.start);
    if let Some(tau) = tau {
        value["mixing_time"] = json!(tau);
    }
    print_json(&value);
    let curve: Vec<(u64, f64)> = report.tv_curve.iter().map(|(t, tv)| (*t, tv.as_f64())).collect();
    let mut arts = Artifacts::new(out.out_dir.as_deref(), m);
    arts.tv_csv("tv.csv", &curve)?;
    arts.json("mixing.json", &value)?;
    arts.finish(None)
}

fn conductance<S: Scalar>(g: &BipartiteGraph, model: &ModelArgs, budget: &Budget, m: RunManifest, out: &OutArgs) -> Result<()> {
    let p = params::<S>(model)?;
    let report = conductance_exact(g, &p, budget)?.to_json();
    print_json(&report);
    let mut arts = Artifacts::new(out.out_dir.as_deref(), m);
    arts.json("conductance.json", &report)?;
    arts.finish(None)
}

fn percolation<S: Scalar>(g: &BipartiteGraph, lambda: &str, p: &str, budget: &Budget, m: RunManifest, out: &OutArgs) -> Result<()> {
    let lambda: S = convert(&parse_rational(lambda)?);
    let p_edge: S = convert(&parse_rational(p)?);
    let params = IsingParams::new(lambda.clone(), S::one() - p_edge.clone())?;
    let lhs = percolation_expectation(g, &lambda, &p_edge, budget)?;
    let rhs = partition_exact(g, &params, budget)?;
    let holds = if S::EXACT {
        lhs == rhs
    } else {
        ((lhs.clone() - rhs.clone()) / rhs.clone()).abs().as_f64() <= 1e-9
    };
    println!("identity holds: {holds}");
    println!("percolation expectation: {lhs}");
    println!("partition function: {rhs}");
    let mut arts = Artifacts::new(out.out_dir.as_deref(), m);
    arts.json(
        "percolation_check.json",
        &json!({ "identity_holds": holds, "percolation": lhs.to_json(), "partition": rhs.to_json() }),
    )?;
    arts.finish(None)
}

#[allow(clippy::too_many_arguments)]
fn cluster_report<S: Scalar>(
    g: &BipartiteGraph,
    model: &ModelArgs,
    side: Side,
    k: usize,
    with_xi: bool,
    budget: &Budget,
    m: RunManifest,
    out: &OutArgs,
) -> Result<()> {
    let p = params::<S>(model)?;
    let mut value = compute_L(g, side, k, &p, budget)?.to_json();
    if with_xi {
        value["xi_exact"] = xi_exact(g, side, &p, budget)?.to_json();
    }
    print_json(&value);
    let mut arts = Artifacts::new(out.out_dir.as_deref(), m);
    arts.json("cluster_report.json", &value)?;
    arts.finish(None)
}
