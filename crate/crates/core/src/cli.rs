//! Command-line front end. Every subcommand reads an optional JSON config
//! file whose values are overridden by flags.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bench::{self, ExperimentConfig, Method, MethodParams};
use crate::diffusion::{estimate_spread, exact_spread_small, DiffusionConfig, SpreadEstimate, EXACT_EDGE_LIMIT};
use crate::error::{Error, Result};
use crate::graph::{generate_gn, load_edge_list, write_edge_list, GnNetwork, GnParams, LoadOptions, Network, NodeId};
use crate::proxy::ProxyKind;
use crate::seeds;

#[derive(Debug, Parser)]
#[command(name = "mtefim", version, about = "Multi-transformation evolutionary influence maximization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Increase log verbosity (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a GN benchmark network.
    Generate(GenerateArgs),
    /// Run one algorithm and score its seed set.
    Run(RunArgs),
    /// Estimate the spread of a seed-set file.
    Evaluate(EvaluateArgs),
    /// Run an experiment suite.
    Experiment(ExperimentArgs),
}

/// Network source: an edge-list file or the GN generator.
#[derive(Clone, Debug, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct NetworkSpec {
    /// Edge-list file (`u v [p]` per line).
    #[arg(long)]
    pub network: Option<PathBuf>,
    /// Generate a GN network instead of reading a file.
    #[arg(long)]
    pub gn: bool,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub communities: Option<usize>,
    #[arg(long)]
    pub degree: Option<usize>,
    /// Fraction of each node's links leaving its community.
    #[arg(long, conflicts_with = "out_links")]
    pub mu: Option<f64>,
    /// Inter-community links per node (alternative to --mu).
    #[arg(long)]
    pub out_links: Option<usize>,
    /// Uniform propagation probability, or the default for unweighted lines.
    #[arg(long)]
    pub p: Option<f64>,
    /// Seed for the generator; defaults to --seed.
    #[arg(long)]
    pub graph_seed: Option<u64>,
    #[arg(long)]
    pub directed: bool,
    /// Read a third column as the per-edge probability.
    #[arg(long)]
    pub weighted: bool,
}

impl NetworkSpec {
    /// Flag values win over `file` values.
    fn merge(self, file: NetworkSpec) -> NetworkSpec {
        NetworkSpec {
            network: self.network.or(file.network),
            gn: self.gn || file.gn,
            nodes: self.nodes.or(file.nodes),
            communities: self.communities.or(file.communities),
            degree: self.degree.or(file.degree),
            mu: self.mu.or(file.mu),
            out_links: self.out_links.or(file.out_links),
            p: self.p.or(file.p),
            graph_seed: self.graph_seed.or(file.graph_seed),
            directed: self.directed || file.directed,
            weighted: self.weighted || file.weighted,
        }
    }

    fn gn_params(&self) -> Result<GnParams> {
        let std = GnParams::standard(0.05);
        let degree = self.degree.unwrap_or(std.degree);
        let mu = match (self.mu, self.out_links) {
            (Some(mu), _) => mu,
            (None, Some(links)) => GnParams::mu_from_out_links(links, degree),
            (None, None) => GnParams::mu_from_out_links(1, degree),
        };
        let params = GnParams {
            communities: self.communities.unwrap_or(std.communities),
            nodes: self.nodes.unwrap_or(std.nodes),
            degree,
            mu,
            p: self.p.unwrap_or(std.p),
        };
        if params.nodes == 0 || params.communities == 0 {
            return Err(Error::config("--nodes and --communities must be positive"));
        }
        Ok(params)
    }

    fn generate(&self, seed: u64) -> Result<GnNetwork> {
        let params = self.gn_params()?;
        let mut rng = seeds::stream(self.graph_seed.unwrap_or(seed), 0);
        generate_gn(&params, &mut rng)
    }

    pub fn load(&self, seed: u64) -> Result<Network> {
        match (&self.network, self.gn) {
            (Some(_), true) => Err(Error::config("give either --network or --gn, not both")),
            (None, false) => Err(Error::config("no network: pass --network FILE or --gn")),
            (None, true) => Ok(self.generate(seed)?.network),
            (Some(path), false) => {
                let opts = LoadOptions {
                    directed: self.directed,
                    default_p: self.p.unwrap_or(LoadOptions::default().default_p),
                    weighted: self.weighted,
                };
                let loaded = load_edge_list(BufReader::new(File::open(path)?), &opts)?;
                let s = loaded.stats;
                if s.self_loops + s.duplicates > 0 {
                    log::warn!("dropped {} self-loops and {} duplicate edges", s.self_loops, s.duplicates);
                }
                let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                Ok(loaded.network.with_name(name))
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub spec: NetworkSpec,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output edge-list path; a `.communities` file is written beside it.
    #[arg(long)]
    pub out: PathBuf,
}

/// Solver and scoring options shared by `run` (flags) and its config file.
#[derive(Clone, Debug, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct RunOptions {
    /// mtefim | mtefim-nk | edvea | tisea | degree | sdd | pagerank | celf
    #[arg(long)]
    pub algo: Option<Method>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Population size N.
    #[arg(long)]
    pub pop: Option<usize>,
    /// Total fitness-evaluation budget (default 5000 per transformation).
    #[arg(long)]
    pub mfe: Option<usize>,
    #[arg(long)]
    pub pc: Option<f64>,
    /// Mutation rate (default 1/k).
    #[arg(long)]
    pub pm: Option<f64>,
    /// SOSS preference weights, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub prefs: Option<Vec<f64>>,
    #[arg(long)]
    pub no_transfer: bool,
    /// Transformations for mtefim / mtefim-nk, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub transformations: Option<Vec<ProxyKind>>,
    /// Monte Carlo replicas for scoring (and CELF).
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub spec: NetworkSpec,
    #[command(flatten)]
    pub opts: RunOptions,
    /// JSON file with any of the network and run options.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
struct RunFile {
    #[serde(flatten)]
    network: NetworkSpec,
    #[serde(flatten)]
    run: RunOptions,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub spec: NetworkSpec,
    /// File with one node label per line.
    #[arg(long)]
    pub seeds: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub replicas: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also enumerate the exact spread (at most 20 edges).
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Suite file: experiment settings plus a `network` object.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub spec: NetworkSpec,
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,
    #[arg(long, value_delimiter = ',')]
    pub k_values: Option<Vec<usize>>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub agreement: bool,
    #[arg(long)]
    pub similarity_samples: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
struct SuiteFile {
    network: NetworkSpec,
    #[serde(flatten)]
    experiment: ExperimentConfig,
}

impl clap::ValueEnum for Method {
    fn value_variants<'a>() -> &'a [Self] {
        &Method::ALL
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(self.name()))
    }
}

impl clap::ValueEnum for ProxyKind {
    fn value_variants<'a>() -> &'a [Self] {
        &[ProxyKind::Edv, ProxyKind::Tis]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            ProxyKind::Edv => "edv",
            ProxyKind::Tis => "tis",
        }))
    }
}

fn read_json<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        Some(p) => Ok(serde_json::from_reader(BufReader::new(File::open(p)?))?),
        None => Ok(T::default()),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Parses and runs the command line; the process exit code is left to the caller.
pub fn main_with(cli: Cli) -> Result<()> {
    let work = move || match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Run(a) => cmd_run(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match cli.workers {
        Some(0) => Err(Error::config("--workers must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(e.to_string()))?
            .install(work),
        None => work(),
    }
}

pub fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let spec = NetworkSpec { gn: true, ..args.spec };
    if spec.network.is_some() {
        return Err(Error::config("generate does not read --network"));
    }
    let gn = spec.generate(args.seed)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(&args.out)?);
    write_edge_list(&gn.network, &mut w)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(args.out.with_extension("communities"))?);
    gn.write_communities(&mut w)?;
    w.flush()?;
    println!(
        "{} nodes, {} edges, {} inter-community edges, residual {}",
        gn.network.node_count(),
        gn.network.edge_count(),
        gn.cut_size(),
        gn.residual
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct Candidate {
    transformation: ProxyKind,
    seeds: Vec<String>,
    fitness: Option<f64>,
    evaluations: usize,
    cumulative_rank: f64,
}

#[derive(Debug, Serialize)]
struct RunResult {
    algorithm: Method,
    network: String,
    nodes: usize,
    edges: usize,
    k: usize,
    seed: u64,
    seeds: Vec<String>,
    spread: SpreadEstimate,
    params: MethodParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    generations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transfers_fired: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transferred: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    candidates: Vec<Candidate>,
}

pub fn cmd_run(args: RunArgs) -> Result<()> {
    let file: RunFile = read_json(args.config.as_deref())?;
    let spec = args.spec.merge(file.network);
    let (o, f) = (args.opts, file.run);
    let seed = o.seed.or(f.seed).unwrap_or(0);
    let k = o.k.or(f.k).ok_or_else(|| Error::config("--k is required"))?;
    if k == 0 {
        return Err(Error::config("--k must be at least 1"));
    }
    let mut method = o.algo.or(f.algo).unwrap_or(Method::Mtefim);
    if (o.no_transfer || f.no_transfer) && method == Method::Mtefim {
        method = Method::MtefimNk;
    }
    let replicas = o.replicas.or(f.replicas).unwrap_or(10_000);
    let defaults = MethodParams::default();
    let params = MethodParams {
        population_size: o.pop.or(f.pop).unwrap_or(defaults.population_size),
        max_evaluations: o.mfe.or(f.mfe),
        pc: o.pc.or(f.pc).unwrap_or(defaults.pc),
        pm: o.pm.or(f.pm),
        prefs: o.prefs.or(f.prefs),
        transformations: o.transformations.or(f.transformations).unwrap_or(defaults.transformations),
        celf_replicas: replicas,
        ..defaults
    };
    let net = spec.load(seed)?;
    log::info!("network {}: {} nodes, {} edges", net.name(), net.node_count(), net.edge_count());

    let run = bench::run_method(&net, method, k, seed, &params)?;
    let eval = DiffusionConfig { replicas, base_seed: seeds::derive(seed, &[0xE7A1]) };
    let spread = estimate_spread(&net, &run.seeds, &eval)?;
    let labels = |s: &[NodeId]| s.iter().map(|&v| net.label(v).to_string()).collect::<Vec<_>>();

    let mut result = RunResult {
        algorithm: method,
        network: net.name().to_string(),
        nodes: net.node_count(),
        edges: net.edge_count(),
        k,
        seed,
        seeds: labels(&run.seeds),
        spread,
        params,
        generations: None,
        transfers_fired: None,
        transferred: None,
        candidates: Vec::new(),
    };
    if let (Some(outcome), Some(soss)) = (&run.outcome, &run.soss) {
        result.generations = Some(outcome.trace.records.len());
        let fired: Vec<_> = outcome.trace.transfers.iter().filter(|t| t.fired).collect();
        result.transfers_fired = Some(fired.len());
        result.transferred = Some(fired.iter().map(|t| t.replaced()).sum());
        result.candidates = outcome
            .best
            .iter()
            .zip(&outcome.transformations)
            .enumerate()
            .map(|(i, (ind, t))| Candidate {
                transformation: t.kind,
                seeds: labels(&ind.seed_set()),
                fitness: ind.fitness(),
                evaluations: t.consumed(),
                cumulative_rank: soss.cumulative[i],
            })
            .collect();
    }

    println!("algorithm: {method}");
    println!("seeds: {}", result.seeds.join(" "));
    println!("spread: {:.4} ± {:.4} ({} replicas)", spread.mean, spread.std_error, spread.replicas);

    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("result.json"), &result)?;
        if let Some(outcome) = &run.outcome {
            let mut w = BufWriter::new(File::create(dir.join("trace.csv"))?);
            outcome.trace.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Reads one label per line, skipping blanks and `#` comments.
pub fn read_seed_file(net: &Network, path: &Path) -> Result<Vec<NodeId>> {
    let index = net.label_index();
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match index.get(line) {
            Some(&v) => out.push(v),
            None => return Err(Error::Parse { line: i + 1, msg: format!("unknown node label {line:?}") }),
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct EvaluateResult {
    network: String,
    seeds: Vec<String>,
    spread: SpreadEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<f64>,
}

pub fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let net = args.spec.load(args.seed)?;
    let seeds = read_seed_file(&net, &args.seeds)?;
    let spread = estimate_spread(&net, &seeds, &DiffusionConfig { replicas: args.replicas, base_seed: args.seed })?;
    let exact = if args.exact {
        if net.edge_count() > EXACT_EDGE_LIMIT {
            return Err(Error::TooLarge { edges: net.edge_count(), limit: EXACT_EDGE_LIMIT });
        }
        Some(exact_spread_small(&net, &seeds)?)
    } else {
        None
    };
    println!("spread: {:.4} ± {:.4} ({} replicas)", spread.mean, spread.std_error, spread.replicas);
    if let Some(x) = exact {
        println!("exact: {x:.6}");
    }
    let result = EvaluateResult {
        network: net.name().to_string(),
        seeds: seeds.iter().map(|&v| net.label(v).to_string()).collect(),
        spread,
        exact,
    };
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("result.json"), &result)?;
    }
    Ok(())
}

pub fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    let file: SuiteFile = read_json(args.config.as_deref())?;
    let spec = args.spec.merge(file.network);
    let mut cfg = file.experiment;
    if let Some(m) = args.methods {
        cfg.methods = m;
    }
    if let Some(k) = args.k_values {
        cfg.k_values = k;
    }
    if let Some(r) = args.repeats {
        cfg.repeats = r;
    }
    if let Some(r) = args.replicas {
        cfg.replicas = r;
    }
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    cfg.agreement |= args.agreement;
    if args.similarity_samples.is_some() {
        cfg.similarity_samples = args.similarity_samples;
    }
    if cfg.methods.is_empty() {
        return Err(Error::config("the suite lists no methods"));
    }
    if cfg.k_values.contains(&0) {
        return Err(Error::config("k values must be at least 1"));
    }
    let net = spec.load(cfg.master_seed)?;
    let report = bench::run_experiment(&net, &cfg)?;
    for row in &report.summary {
        println!("{:<10} k={:<3} {:.3} ± {:.3} ({} runs)", row.method, row.k, row.mean, row.std, row.runs);
    }
    for c in &report.comparisons {
        println!("{} vs {} at k={}: p={:.4} ({})", c.method, c.reference, c.k, c.p_value, c.verdict.symbol());
    }
    report.write_to(&args.out)
}
