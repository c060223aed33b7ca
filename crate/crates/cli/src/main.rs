mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use expander_ising::Error;

#[derive(Parser, Debug)]
#[command(name = "expander-ising", version, about = "Antiferromagnetic Ising model on bipartite expanders")]
pub struct Cli {
    /// Worker threads; defaults to the available cores and is forced to 1
    /// for exact rational runs.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a generated graph as an edge list.
    Gen {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        out: String,
    },
    /// Check codegree and expansion conditions.
    Validate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 2)]
        delta2: usize,
        #[arg(long, default_value = "1/2")]
        kappa: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exact partition function.
    ExactZ {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Cluster-expansion approximation of the partition function.
    ApproxZ {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Draw samples with the polymer sampler.
    Sample {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = ZMode::Exact)]
        mode: ZMode,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exact TV curve of Glauber dynamics from one start.
    Mix {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Chain::Glauber)]
        chain: Chain,
        /// Side-swapping automorphism, one image per line.
        #[arg(long)]
        flip: Option<String>,
        #[arg(long, default_value_t = 100)]
        t_max: u64,
        /// `empty`, `even`, `odd` or a comma-separated vertex list.
        #[arg(long, default_value = "even")]
        start: String,
        /// Also compute the worst-start mixing time to this distance.
        #[arg(long)]
        mixing_eps: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exact conductance of the majority-side cuts.
    Conductance {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare the percolation expectation with the partition function.
    PercolationCheck {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value = "1")]
        lambda: String,
        /// Edge retention probability `1 - q`.
        #[arg(long)]
        p: String,
        #[arg(long, value_enum)]
        numeric: Option<Numeric>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Truncated cluster expansion of one side.
    ClusterReport {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = SideArg::Even)]
        side: SideArg,
        #[arg(long)]
        k: usize,
        /// Include the exact polymer partition function.
        #[arg(long)]
        with_xi: bool,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    /// Generator spec such as `hypercube:3` or `file:g.edges`.
    #[arg(long)]
    pub graph: String,
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    #[arg(long, default_value = "1")]
    pub lambda: String,
    #[arg(long, conflicts_with = "beta", required_unless_present = "beta")]
    pub q: Option<String>,
    /// Inverse temperature, float mode only.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_enum)]
    pub numeric: Option<Numeric>,
}

#[derive(Args, Debug)]
pub struct SamplerArgs {
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Truncation order instead of the selected `k0`.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value_t = Rule::TruncatedLinear)]
    pub defect_rule: Rule,
    #[arg(long, default_value_t = 0.5)]
    pub kappa: f64,
    #[arg(long, default_value_t = 2.0)]
    pub delta2: f64,
    /// Never fall back to exact enumeration for tiny `epsilon`.
    #[arg(long)]
    pub no_brute_force: bool,
}

#[derive(Args, Debug)]
pub struct OutArgs {
    /// Directory for the JSON/CSV artifacts and the run manifest.
    #[arg(long)]
    pub out_dir: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Numeric {
    Rational,
    Float,
    Log,
}

#[derive(Clone, Copy, Debug, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZMode {
    Exact,
    Truncated,
}

#[derive(Clone, Copy, Debug, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    TruncatedLinear,
    TruncatedExp,
    ExactXi,
}

#[derive(Clone, Copy, Debug, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chain {
    Glauber,
    Flips,
}

#[derive(Clone, Copy, Debug, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideArg {
    Even,
    Odd,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Budget { .. } => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
