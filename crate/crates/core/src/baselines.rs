//! Reference seed selection methods.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Duration;

use serde::Serialize;

use crate::diffusion::{estimate_spread, exact_spread_small, DiffusionConfig};
use crate::error::{Error, Result};
use crate::evo::top_k_by_degree;
use crate::graph::{Network, NodeId};
use crate::mtefim::{self, RunOutcome, SolverConfig};
use crate::proxy::ProxyKind;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BaselineResult {
    pub method: String,
    /// Seeds in selection order.
    pub seeds: Vec<NodeId>,
    /// Selection score of each seed (degree, rank score, marginal gain, ...).
    pub scores: Vec<f64>,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Runs `f` and measures it. Wall clocks are unavailable on bare wasm, where
/// the duration is reported as zero.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    #[cfg(not(target_arch = "wasm32"))]
    {
        let start = std::time::Instant::now();
        let out = f();
        (out, start.elapsed())
    }
    #[cfg(target_arch = "wasm32")]
    {
        (f(), Duration::ZERO)
    }
}

fn check_k(net: &Network, k: usize) -> Result<()> {
    if k == 0 || k > net.node_count() {
        return Err(Error::config(format!("k = {k} must be in 1..={}", net.node_count())));
    }
    Ok(())
}

pub fn degree_select(net: &Network, k: usize) -> Result<BaselineResult> {
    check_k(net, k)?;
    let (seeds, wall_time) = timed(|| top_k_by_degree(net, k));
    let scores = seeds.iter().map(|&v| net.deg(v) as f64).collect();
    Ok(BaselineResult { method: "degree".into(), seeds, scores, wall_time })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PageRank {
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Power iteration; dangling mass is spread uniformly. Stops when the L1
/// change drops below `tol`.
pub fn pagerank(net: &Network, damping: f64, tol: f64, max_iter: usize) -> PageRank {
    let n = net.node_count();
    if n == 0 {
        return PageRank { scores: Vec::new(), iterations: 0, converged: true };
    }
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    for it in 1..=max_iter {
        let dangling: f64 = (0..n as NodeId).filter(|&u| net.deg(u) == 0).map(|u| rank[u as usize]).sum();
        let base = (1.0 - damping) / nf + damping * dangling / nf;
        next.iter_mut().for_each(|x| *x = base);
        for u in 0..n as NodeId {
            let d = net.deg(u);
            if d > 0 {
                let share = damping * rank[u as usize] / d as f64;
                for &v in net.adj(u) {
                    next[v as usize] += share;
                }
            }
        }
        let delta: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if delta < tol {
            return PageRank { scores: rank, iterations: it, converged: true };
        }
    }
    log::warn!("PageRank did not converge in {max_iter} iterations");
    PageRank { scores: rank, iterations: max_iter, converged: false }
}

fn top_k_by_score(scores: &[f64], k: usize) -> Vec<NodeId> {
    let mut ids: Vec<NodeId> = (0..scores.len() as NodeId).collect();
    ids.sort_by(|&a, &b| scores[b as usize].total_cmp(&scores[a as usize]).then(a.cmp(&b)));
    ids.truncate(k);
    ids
}

pub fn pagerank_select(net: &Network, k: usize, damping: f64, tol: f64, max_iter: usize) -> Result<BaselineResult> {
    check_k(net, k)?;
    let (pr, wall_time) = timed(|| pagerank(net, damping, tol, max_iter));
    let seeds = top_k_by_score(&pr.scores, k);
    let scores = seeds.iter().map(|&v| pr.scores[v as usize]).collect();
    Ok(BaselineResult { method: "pagerank".into(), seeds, scores, wall_time })
}

/// Degree discount: `dd_v = d_v - 2 t_v - (d_v - t_v) t_v p`, where `t_v`
/// counts already selected neighbours of `v`.
pub fn degree_discount_select(net: &Network, k: usize, p: f64) -> Result<BaselineResult> {
    check_k(net, k)?;
    let ((seeds, scores), wall_time) = timed(|| {
        let n = net.node_count();
        let mut dd: Vec<f64> = (0..n as NodeId).map(|v| net.deg(v) as f64).collect();
        let mut t = vec![0usize; n];
        let mut chosen = vec![false; n];
        let (mut seeds, mut scores) = (Vec::with_capacity(k), Vec::with_capacity(k));
        for _ in 0..k {
            let u = (0..n)
                .filter(|&v| !chosen[v])
                .fold(None, |best: Option<usize>, v| match best {
                    Some(b) if dd[b] >= dd[v] => Some(b),
                    _ => Some(v),
                })
                .expect("k <= |V|");
            chosen[u] = true;
            seeds.push(u as NodeId);
            scores.push(dd[u]);
            for &v in net.adj(u as NodeId) {
                let v = v as usize;
                if !chosen[v] {
                    t[v] += 1;
                    let (d, tv) = (net.deg(v as NodeId) as f64, t[v] as f64);
                    dd[v] = d - 2.0 * tv - (d - tv) * tv * p;
                }
            }
        }
        (seeds, scores)
    });
    Ok(BaselineResult { method: "sdd".into(), seeds, scores, wall_time })
}

/// An expected-spread evaluator for greedy selection.
pub trait SpreadOracle {
    fn spread(&self, net: &Network, seeds: &[NodeId]) -> Result<f64>;
}

/// Monte Carlo estimate; every call reuses the same replica streams.
pub struct MonteCarlo(pub DiffusionConfig);

impl SpreadOracle for MonteCarlo {
    fn spread(&self, net: &Network, seeds: &[NodeId]) -> Result<f64> {
        Ok(estimate_spread(net, seeds, &self.0)?.mean)
    }
}

/// Exact live-edge enumeration; only for graphs with at most 20 edges.
pub struct ExactOracle;

impl SpreadOracle for ExactOracle {
    fn spread(&self, net: &Network, seeds: &[NodeId]) -> Result<f64> {
        exact_spread_small(net, seeds)
    }
}

#[derive(PartialEq)]
struct Gain {
    value: f64,
    node: NodeId,
    /// Seed-set size the gain was computed against.
    round: usize,
}

impl Eq for Gain {}

impl Ord for Gain {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.total_cmp(&other.value).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Gain {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub const CELF_NODE_WARNING: usize = 5_000;

/// Lazy greedy (CELF): stale marginal gains act as upper bounds and are only
/// recomputed when they reach the top of the queue.
pub fn celf_select<O: SpreadOracle>(net: &Network, k: usize, oracle: &O) -> Result<BaselineResult> {
    check_k(net, k)?;
    if net.node_count() > CELF_NODE_WARNING {
        log::warn!("CELF on {} nodes will be slow", net.node_count());
    }
    let (res, wall_time) = timed(|| -> Result<_> {
        let mut heap = BinaryHeap::with_capacity(net.node_count());
        for v in 0..net.node_count() as NodeId {
            heap.push(Gain { value: oracle.spread(net, &[v])?, node: v, round: 0 });
        }
        let mut seeds: Vec<NodeId> = Vec::with_capacity(k);
        let mut scores = Vec::with_capacity(k);
        let mut current = 0.0;
        while seeds.len() < k {
            let top = heap.pop().expect("heap holds every unselected node");
            if top.round == seeds.len() {
                seeds.push(top.node);
                scores.push(top.value);
                current = oracle.spread(net, &seeds)?;
                continue;
            }
            let mut trial = seeds.clone();
            trial.push(top.node);
            let value = oracle.spread(net, &trial)? - current;
            heap.push(Gain { value, node: top.node, round: seeds.len() });
        }
        Ok((seeds, scores))
    });
    let (seeds, scores) = res?;
    Ok(BaselineResult { method: "celf".into(), seeds, scores, wall_time })
}

/// Plain greedy: recompute every marginal gain each round.
pub fn naive_greedy<O: SpreadOracle>(net: &Network, k: usize, oracle: &O) -> Result<BaselineResult> {
    check_k(net, k)?;
    let (res, wall_time) = timed(|| -> Result<_> {
        let mut seeds: Vec<NodeId> = Vec::with_capacity(k);
        let mut scores = Vec::with_capacity(k);
        let mut current = 0.0;
        for _ in 0..k {
            let mut best: Option<(NodeId, f64)> = None;
            for v in 0..net.node_count() as NodeId {
                if seeds.contains(&v) {
                    continue;
                }
                let mut trial = seeds.clone();
                trial.push(v);
                let gain = oracle.spread(net, &trial)? - current;
                if best.is_none_or(|(_, g)| gain > g) {
                    best = Some((v, gain));
                }
            }
            let (v, g) = best.expect("k <= |V|");
            seeds.push(v);
            scores.push(g);
            current = oracle.spread(net, &seeds)?;
        }
        Ok((seeds, scores))
    });
    let (seeds, scores) = res?;
    Ok(BaselineResult { method: "greedy".into(), seeds, scores, wall_time })
}

/// A single-population EA on one proxy (EDVEA / TISEA).
pub fn single_transformation_ea(
    net: &Network,
    which: ProxyKind,
    cfg: &SolverConfig,
) -> Result<(BaselineResult, RunOutcome)> {
    let (outcome, wall_time) = timed(|| mtefim::run(net, &[which], cfg));
    let outcome = outcome?;
    let best = &outcome.best[0];
    let method = format!("{}ea", which.name().to_lowercase());
    let res =
        BaselineResult { method, seeds: best.seed_set(), scores: vec![best.fitness().unwrap_or(f64::NAN)], wall_time };
    Ok((res, outcome))
}
