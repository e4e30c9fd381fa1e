//! Experiment harness: repeated runs over a k sweep, Monte Carlo scoring,
//! rank-sum comparisons, convergence and relationship traces, and the
//! EDV/TIS landscape similarity.

pub mod stats;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{self, timed, MonteCarlo};
use crate::diffusion::{estimate_spread, DiffusionConfig, SpreadEstimate};
use crate::error::{Error, Result};
use crate::graph::{Network, NodeId};
use crate::mtefim::{self, RunOutcome, SolverConfig, SossOutcome};
use crate::proxy::{ProxyKind, Transformation};
use crate::seeds;

pub use stats::{average_ranks, spearman, spearman_p_value, wilcoxon_rank_sum, RankSumTest, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Mtefim,
    MtefimNk,
    Edvea,
    Tisea,
    Degree,
    Sdd,
    Pagerank,
    Celf,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Mtefim,
        Method::MtefimNk,
        Method::Edvea,
        Method::Tisea,
        Method::Degree,
        Method::Sdd,
        Method::Pagerank,
        Method::Celf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Mtefim => "mtefim",
            Method::MtefimNk => "mtefim-nk",
            Method::Edvea => "edvea",
            Method::Tisea => "tisea",
            Method::Degree => "degree",
            Method::Sdd => "sdd",
            Method::Pagerank => "pagerank",
            Method::Celf => "celf",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| Error::config(format!("unknown method {s:?}")))
    }
}

/// Parameters shared by all methods of an experiment or a single run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodParams {
    pub population_size: usize,
    pub max_evaluations: Option<usize>,
    pub pc: f64,
    pub pm: Option<f64>,
    pub prefs: Option<Vec<f64>>,
    /// Transformations co-evolved by the multi-transformation methods.
    pub transformations: Vec<ProxyKind>,
    pub pagerank_damping: f64,
    pub pagerank_tol: f64,
    pub pagerank_max_iter: usize,
    pub celf_replicas: usize,
}

impl Default for MethodParams {
    fn default() -> Self {
        MethodParams {
            population_size: 100,
            max_evaluations: None,
            pc: 1.0,
            pm: None,
            prefs: None,
            transformations: vec![ProxyKind::Edv, ProxyKind::Tis],
            pagerank_damping: 0.85,
            pagerank_tol: 1e-8,
            pagerank_max_iter: 200,
            celf_replicas: 10_000,
        }
    }
}

impl MethodParams {
    pub fn solver_config(&self, k: usize, seed: u64, transfer: bool) -> SolverConfig {
        SolverConfig {
            population_size: self.population_size,
            k,
            max_evaluations: self.max_evaluations,
            pc: self.pc,
            pm: self.pm,
            prefs: self.prefs.clone(),
            base_seed: seed,
            transfer_enabled: transfer,
        }
    }
}

/// Output of one method invocation.
#[derive(Clone, Debug)]
pub struct MethodRun {
    pub method: Method,
    pub seeds: Vec<NodeId>,
    pub outcome: Option<RunOutcome>,
    pub soss: Option<SossOutcome>,
    pub wall_time: Duration,
}

/// Runs `method` once with seed `seed`.
pub fn run_method(net: &Network, method: Method, k: usize, seed: u64, params: &MethodParams) -> Result<MethodRun> {
    let solver = |kinds: &[ProxyKind], transfer: bool| -> Result<MethodRun> {
        let cfg = params.solver_config(k, seed, transfer);
        let (sol, wall_time) = timed(|| mtefim::solve(net, kinds, &cfg));
        let sol = sol?;
        Ok(MethodRun { method, seeds: sol.seeds, outcome: Some(sol.outcome), soss: Some(sol.soss), wall_time })
    };
    let baseline = |r: baselines::BaselineResult| MethodRun {
        method,
        seeds: r.seeds,
        outcome: None,
        soss: None,
        wall_time: r.wall_time,
    };
    match method {
        Method::Mtefim => solver(&params.transformations, true),
        Method::MtefimNk => solver(&params.transformations, false),
        Method::Edvea => solver(&[ProxyKind::Edv], true),
        Method::Tisea => solver(&[ProxyKind::Tis], true),
        Method::Degree => baselines::degree_select(net, k).map(baseline),
        Method::Sdd => baselines::degree_discount_select(net, k, net.base_p()).map(baseline),
        Method::Pagerank => {
            baselines::pagerank_select(net, k, params.pagerank_damping, params.pagerank_tol, params.pagerank_max_iter)
                .map(baseline)
        }
        Method::Celf => {
            let oracle = MonteCarlo(DiffusionConfig { replicas: params.celf_replicas, base_seed: seed });
            baselines::celf_select(net, k, &oracle).map(baseline)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimilarityResult {
    pub coefficient: Option<f64>,
    pub p_value: Option<f64>,
    pub samples: usize,
}

/// Spearman correlation between EDV and TIS over uniformly random `k`-sets.
pub fn spearman_similarity<R: Rng + ?Sized>(
    net: &Network,
    k: usize,
    samples: usize,
    rng: &mut R,
) -> Result<SimilarityResult> {
    if samples < 2 {
        return Err(Error::config("similarity needs at least two samples"));
    }
    if k == 0 || k > net.node_count() {
        return Err(Error::config(format!("k = {k} must be in 1..={}", net.node_count())));
    }
    let edv = Transformation::new(0, ProxyKind::Edv, net, 0);
    let tis = Transformation::new(1, ProxyKind::Tis, net, 0);
    let mut a = Vec::with_capacity(samples);
    let mut b = Vec::with_capacity(samples);
    for _ in 0..samples {
        let set: Vec<NodeId> = index::sample(rng, net.node_count(), k).into_iter().map(|v| v as NodeId).collect();
        a.push(edv.fitness(net, &set));
        b.push(tis.fitness(net, &set));
    }
    let coefficient = spearman(&a, &b);
    let p_value = coefficient.and_then(|r| spearman_p_value(r, samples));
    Ok(SimilarityResult { coefficient, p_value, samples })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub methods: Vec<Method>,
    pub k_values: Vec<usize>,
    pub repeats: usize,
    /// Monte Carlo replicas used to score every output seed set.
    pub replicas: usize,
    pub master_seed: u64,
    /// Method the others are tested against; the first method when unset.
    pub reference: Option<Method>,
    pub alpha: f64,
    /// Also run MCSS on multi-transformation runs and record agreement with SOSS.
    pub agreement: bool,
    /// Random seed sets for the EDV/TIS similarity; skipped when unset.
    pub similarity_samples: Option<usize>,
    pub params: MethodParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            methods: Vec::new(),
            k_values: vec![30],
            repeats: 20,
            replicas: 10_000,
            master_seed: 0,
            reference: None,
            alpha: 0.05,
            agreement: false,
            similarity_samples: None,
            params: MethodParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellResult {
    pub method: Method,
    pub k: usize,
    pub repeat: usize,
    /// Seed handed to the method; replays this cell with `run_method`.
    pub seed: u64,
    pub seeds: Vec<String>,
    pub spread: SpreadEstimate,
    /// Whether SOSS and MCSS chose the same seed set.
    pub soss_matches_mcss: Option<bool>,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub method: Method,
    pub k: usize,
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub method: Method,
    pub reference: Method,
    pub k: usize,
    pub p_value: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgreementRow {
    pub method: Method,
    pub k: usize,
    pub runs: usize,
    pub agreeing: usize,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub method: Method,
    pub k: usize,
    pub transformation: ProxyKind,
    pub generation: usize,
    pub runs: usize,
    pub mean_evals: f64,
    pub mean_best: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationshipPoint {
    pub method: Method,
    pub k: usize,
    pub pair: String,
    pub generation: usize,
    pub runs: usize,
    pub mean_r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub network: String,
    pub master_seed: u64,
    pub repeats: usize,
    pub replicas: usize,
    pub cells: Vec<CellResult>,
    pub summary: Vec<SummaryRow>,
    pub comparisons: Vec<Comparison>,
    pub agreement: Vec<AgreementRow>,
    pub convergence: Vec<ConvergencePoint>,
    pub relationship: Vec<RelationshipPoint>,
    pub similarity: Option<SimilarityResult>,
    /// Wall time per method summed over the k sweep and repeats.
    #[serde(skip)]
    pub runtime: Vec<(Method, Duration)>,
}

const TAG_EVAL: u64 = 0xE7A1;
const TAG_SIMILARITY: u64 = 0x51A1;

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std =
        if xs.len() > 1 { (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
    (mean, std)
}

struct CellOutput {
    result: CellResult,
    outcome: Option<RunOutcome>,
}

fn run_cell(net: &Network, cfg: &ExperimentConfig, method: Method, k: usize, repeat: usize) -> Result<CellOutput> {
    let seed = seeds::derive(cfg.master_seed, &[k as u64, repeat as u64]);
    let eval = DiffusionConfig {
        replicas: cfg.replicas,
        base_seed: seeds::derive(cfg.master_seed, &[TAG_EVAL, k as u64, repeat as u64]),
    };
    let run = run_method(net, method, k, seed, &cfg.params)?;
    let spread = estimate_spread(net, &run.seeds, &eval)?;
    let mut soss_matches_mcss = None;
    if cfg.agreement {
        if let (Some(outcome), Some(soss)) = (&run.outcome, &run.soss) {
            if outcome.best.len() > 1 {
                let mc = mtefim::mcss(&outcome.best, net, &eval)?;
                soss_matches_mcss = Some(outcome.best[mc.chosen].seed_set() == outcome.best[soss.chosen].seed_set());
            }
        }
    }
    let result = CellResult {
        method,
        k,
        repeat,
        seed,
        seeds: run.seeds.iter().map(|&v| net.label(v).to_string()).collect(),
        spread,
        soss_matches_mcss,
        wall_time: run.wall_time,
    };
    Ok(CellOutput { result, outcome: run.outcome })
}

/// Runs every `(method, k, repeat)` cell. Cells are independent and may run
/// concurrently; aggregation follows cell order, so the report depends only
/// on the configuration.
pub fn run_experiment(net: &Network, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.methods.is_empty() {
        return Err(Error::config("no methods given"));
    }
    if cfg.k_values.is_empty() || cfg.repeats == 0 {
        return Err(Error::config("need at least one k value and one repeat"));
    }
    let mut cells = Vec::new();
    for &m in &cfg.methods {
        for &k in &cfg.k_values {
            for rep in 0..cfg.repeats {
                cells.push((m, k, rep));
            }
        }
    }
    #[cfg(feature = "parallel")]
    let outputs: Vec<CellOutput> = {
        use rayon::prelude::*;
        cells.par_iter().map(|&(m, k, rep)| run_cell(net, cfg, m, k, rep)).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let outputs: Vec<CellOutput> =
        cells.iter().map(|&(m, k, rep)| run_cell(net, cfg, m, k, rep)).collect::<Result<_>>()?;

    let mut groups: BTreeMap<(usize, usize), Vec<&CellOutput>> = BTreeMap::new();
    let method_pos = |m: Method| cfg.methods.iter().position(|&x| x == m).unwrap();
    for out in &outputs {
        groups.entry((method_pos(out.result.method), out.result.k)).or_default().push(out);
    }
    let spreads_of = |group: &[&CellOutput]| group.iter().map(|c| c.result.spread.mean).collect::<Vec<_>>();

    let mut summary = Vec::new();
    let mut agreement = Vec::new();
    let mut convergence = Vec::new();
    let mut relationship = Vec::new();
    for (&(mi, k), group) in &groups {
        let method = cfg.methods[mi];
        let (mean, std) = mean_std(&spreads_of(group));
        summary.push(SummaryRow { method, k, runs: group.len(), mean, std });

        let flags: Vec<bool> = group.iter().filter_map(|c| c.result.soss_matches_mcss).collect();
        if !flags.is_empty() {
            let agreeing = flags.iter().filter(|&&f| f).count();
            agreement.push(AgreementRow {
                method,
                k,
                runs: flags.len(),
                agreeing,
                rate: agreeing as f64 / flags.len() as f64,
            });
        }

        let traces: Vec<&mtefim::RunTrace> =
            group.iter().filter_map(|c| c.outcome.as_ref().map(|o| &o.trace)).collect();
        if let Some(first) = traces.first() {
            let kinds = &first.transformations;
            let gens = traces.iter().map(|t| t.records.len()).max().unwrap_or(0);
            for g in 0..gens {
                let recs: Vec<_> = traces.iter().filter_map(|t| t.records.get(g)).collect();
                let runs = recs.len();
                for (ti, &kind) in kinds.iter().enumerate() {
                    convergence.push(ConvergencePoint {
                        method,
                        k,
                        transformation: kind,
                        generation: g,
                        runs,
                        mean_evals: recs.iter().map(|r| r.evals[ti] as f64).sum::<f64>() / runs as f64,
                        mean_best: recs.iter().map(|r| r.best[ti]).sum::<f64>() / runs as f64,
                    });
                }
                let mut pair = 0;
                for i in 0..kinds.len() {
                    for j in i + 1..kinds.len() {
                        relationship.push(RelationshipPoint {
                            method,
                            k,
                            pair: format!("{}-{}", kinds[i].name(), kinds[j].name()),
                            generation: g,
                            runs,
                            mean_r: recs.iter().map(|r| r.r[pair]).sum::<f64>() / runs as f64,
                        });
                        pair += 1;
                    }
                }
            }
        }
    }

    let reference = cfg.reference.unwrap_or(cfg.methods[0]);
    let mut comparisons = Vec::new();
    if cfg.repeats >= 2 {
        if let Some(ri) = cfg.methods.iter().position(|&m| m == reference) {
            for (&(mi, k), group) in &groups {
                if mi == ri {
                    continue;
                }
                let reference_spreads = spreads_of(&groups[&(ri, k)]);
                let t = wilcoxon_rank_sum(&spreads_of(group), &reference_spreads, cfg.alpha)?;
                comparisons.push(Comparison {
                    method: cfg.methods[mi],
                    reference,
                    k,
                    p_value: t.p_value,
                    verdict: t.verdict,
                });
            }
        }
    }

    let runtime = cfg
        .methods
        .iter()
        .map(|&m| {
            let total = outputs.iter().filter(|c| c.result.method == m).map(|c| c.result.wall_time).sum();
            (m, total)
        })
        .collect();

    let similarity = match cfg.similarity_samples {
        Some(samples) => {
            let k = *cfg.k_values.iter().max().unwrap();
            let mut rng = seeds::rng_for(cfg.master_seed, &[TAG_SIMILARITY]);
            Some(spearman_similarity(net, k, samples, &mut rng)?)
        }
        None => None,
    };

    Ok(ExperimentReport {
        network: net.name().to_string(),
        master_seed: cfg.master_seed,
        repeats: cfg.repeats,
        replicas: cfg.replicas,
        cells: outputs.into_iter().map(|c| c.result).collect(),
        summary,
        comparisons,
        agreement,
        convergence,
        relationship,
        similarity,
        runtime,
    })
}

impl ExperimentReport {
    pub fn summary_for(&self, method: Method, k: usize) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.method == method && r.k == k)
    }

    pub fn spreads(&self, method: Method, k: usize) -> Vec<f64> {
        self.cells.iter().filter(|c| c.method == method && c.k == k).map(|c| c.spread.mean).collect()
    }

    /// Writes `report.json` plus one CSV per table. Every file except
    /// `runtime.csv` is a pure function of the configuration.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        serde_json::to_writer_pretty(BufWriter::new(File::create(dir.join("report.json"))?), self)?;
        write_csv(&dir.join("spread_vs_k.csv"), &self.summary)?;
        write_csv(&dir.join("comparisons.csv"), &self.comparisons)?;
        write_csv(&dir.join("agreement.csv"), &self.agreement)?;
        write_csv(&dir.join("convergence.csv"), &self.convergence)?;
        write_csv(&dir.join("r_trajectory.csv"), &self.relationship)?;
        let mut w = csv::Writer::from_path(dir.join("runtime.csv"))?;
        w.write_record(["method", "seconds"])?;
        for (m, d) in &self.runtime {
            w.write_record([m.name().to_string(), format!("{:.6}", d.as_secs_f64())])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_gn, GnParams};

    fn small_gn() -> Network {
        let p = GnParams { communities: 2, nodes: 24, degree: 4, mu: 0.25, p: 0.1 };
        generate_gn(&p, &mut seeds::stream(1, 0)).unwrap().network
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("mfea".parse::<Method>().is_err());
    }

    #[test]
    fn single_deterministic_method() {
        let net = small_gn();
        let cfg = ExperimentConfig {
            methods: vec![Method::Degree],
            k_values: vec![3],
            repeats: 1,
            replicas: 200,
            ..Default::default()
        };
        let rep = run_experiment(&net, &cfg).unwrap();
        assert_eq!(rep.summary.len(), 1);
        assert_eq!(rep.summary[0].std, 0.0);
        assert!(rep.comparisons.is_empty());
    }

    #[test]
    fn empty_method_list_rejected() {
        assert!(run_experiment(&small_gn(), &ExperimentConfig::default()).is_err());
    }

    #[test]
    fn report_is_reproducible() {
        let net = small_gn();
        let mut params = MethodParams { population_size: 10, max_evaluations: Some(400), ..Default::default() };
        params.celf_replicas = 50;
        let cfg = ExperimentConfig {
            methods: vec![Method::Mtefim, Method::MtefimNk, Method::Sdd],
            k_values: vec![2, 4],
            repeats: 3,
            replicas: 300,
            master_seed: 42,
            agreement: true,
            similarity_samples: Some(50),
            params,
            ..Default::default()
        };
        let a = run_experiment(&net, &cfg).unwrap();
        let b = run_experiment(&net, &cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.comparisons.len(), 4);
        assert_eq!(a.agreement.len(), 4);
        assert!(a.similarity.unwrap().coefficient.is_some());
        assert!(!a.convergence.is_empty() && !a.relationship.is_empty());
    }

    #[test]
    fn similarity_rejects_single_sample() {
        let mut rng = seeds::stream(0, 0);
        assert!(spearman_similarity(&small_gn(), 3, 1, &mut rng).is_err());
    }
}
