//! Independent cascade spread: Monte Carlo estimation and an exact
//! live-edge enumeration for tiny graphs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Network, NodeId};
use crate::seeds;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub replicas: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffusionConfig {
    pub replicas: usize,
    pub base_seed: u64,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        DiffusionConfig { replicas: 10_000, base_seed: 0 }
    }
}

/// Rejects out-of-range or repeated seed ids.
pub fn validate_seeds(net: &Network, seeds: &[NodeId]) -> Result<()> {
    let n = net.node_count();
    let mut seen = vec![false; n];
    for &s in seeds {
        let i = s as usize;
        if i >= n {
            return Err(Error::NodeOutOfRange { id: i, nodes: n });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::invalid(format!("seed {s} repeated")));
        }
    }
    Ok(())
}

/// Reusable cascade buffers. `mark[v] == epoch` means v is active.
struct Cascade {
    mark: Vec<u32>,
    epoch: u32,
    frontier: Vec<NodeId>,
    next: Vec<NodeId>,
}

impl Cascade {
    fn new(n: usize) -> Self {
        Cascade { mark: vec![0; n], epoch: 0, frontier: Vec::new(), next: Vec::new() }
    }

    fn run<R: Rng + ?Sized>(&mut self, net: &Network, seeds: &[NodeId], rng: &mut R) -> usize {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        self.frontier.clear();
        for &s in seeds {
            self.mark[s as usize] = epoch;
            self.frontier.push(s);
        }
        let mut active = seeds.len();
        while !self.frontier.is_empty() {
            self.next.clear();
            for &u in &self.frontier {
                for (v, p) in net.arcs(u) {
                    if self.mark[v as usize] != epoch && rng.gen::<f64>() < p {
                        self.mark[v as usize] = epoch;
                        self.next.push(v);
                        active += 1;
                    }
                }
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
        }
        active
    }
}

/// One cascade from `seeds`; returns the number of active nodes, seeds included.
pub fn simulate_ic_once<R: Rng + ?Sized>(net: &Network, seeds: &[NodeId], rng: &mut R) -> Result<usize> {
    validate_seeds(net, seeds)?;
    Ok(Cascade::new(net.node_count()).run(net, seeds, rng))
}

const BLOCK: usize = 256;

/// Mean of `cfg.replicas` cascades. Replica `r` draws from stream `r` of
/// `cfg.base_seed`, so the estimate is identical for any thread count.
pub fn estimate_spread(net: &Network, seeds: &[NodeId], cfg: &DiffusionConfig) -> Result<SpreadEstimate> {
    validate_seeds(net, seeds)?;
    if cfg.replicas == 0 {
        return Err(Error::config("replicas must be at least 1"));
    }
    let blocks = cfg.replicas.div_ceil(BLOCK);
    let run_block = |b: usize| -> (u64, u64) {
        let mut cascade = Cascade::new(net.node_count());
        let (mut sum, mut sq) = (0u64, 0u64);
        for r in b * BLOCK..((b + 1) * BLOCK).min(cfg.replicas) {
            let mut rng = seeds::stream(cfg.base_seed, r as u64);
            let c = cascade.run(net, seeds, &mut rng) as u64;
            sum += c;
            sq += c * c;
        }
        (sum, sq)
    };
    #[cfg(feature = "parallel")]
    let (sum, sq) = {
        use rayon::prelude::*;
        (0..blocks).into_par_iter().map(run_block).reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    };
    #[cfg(not(feature = "parallel"))]
    let (sum, sq) = (0..blocks).map(run_block).fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let n = cfg.replicas as f64;
    let mean = sum as f64 / n;
    let std_error = if cfg.replicas > 1 {
        let var = ((sq as f64 - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(SpreadEstimate { mean, std_error, replicas: cfg.replicas })
}

pub const EXACT_EDGE_LIMIT: usize = 20;

/// Exact expected spread by summing reachability over all `2^|E|` live-edge
/// subsets. An undirected edge is a single coin: at most one of its two
/// activation attempts can ever matter in a cascade.
pub fn exact_spread_small(net: &Network, seeds: &[NodeId]) -> Result<f64> {
    validate_seeds(net, seeds)?;
    let edges: Vec<(NodeId, NodeId, f64)> = net.edges().collect();
    let m = edges.len();
    if m > EXACT_EDGE_LIMIT {
        return Err(Error::TooLarge { edges: m, limit: EXACT_EDGE_LIMIT });
    }
    let n = net.node_count();
    // per node: (neighbour, edge index)
    let mut inc: Vec<Vec<(NodeId, usize)>> = vec![Vec::new(); n];
    for (i, &(u, v, _)) in edges.iter().enumerate() {
        inc[u as usize].push((v, i));
        if !net.is_directed() {
            inc[v as usize].push((u, i));
        }
    }
    let mut total = 0.0;
    let mut reached = vec![false; n];
    let mut stack = Vec::with_capacity(n);
    for mask in 0u64..(1u64 << m) {
        let mut weight = 1.0;
        for (i, &(_, _, p)) in edges.iter().enumerate() {
            weight *= if mask >> i & 1 == 1 { p } else { 1.0 - p };
        }
        if weight == 0.0 {
            continue;
        }
        reached.iter_mut().for_each(|r| *r = false);
        stack.clear();
        let mut count = 0usize;
        for &s in seeds {
            reached[s as usize] = true;
            stack.push(s);
            count += 1;
        }
        while let Some(u) = stack.pop() {
            for &(v, i) in &inc[u as usize] {
                if mask >> i & 1 == 1 && !reached[v as usize] {
                    reached[v as usize] = true;
                    stack.push(v);
                    count += 1;
                }
            }
        }
        total += weight * count as f64;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(p: f64) -> Network {
        Network::from_edges(3, &[(0, 1), (1, 2)], false, p).unwrap()
    }

    #[test]
    fn zero_probability_activates_only_seeds() {
        let net = path(0.0);
        let mut rng = seeds::stream(1, 0);
        assert_eq!(simulate_ic_once(&net, &[0, 2], &mut rng).unwrap(), 2);
        let est = estimate_spread(&net, &[1], &DiffusionConfig { replicas: 500, base_seed: 3 }).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn full_probability_reaches_component() {
        let net = path(1.0);
        let mut rng = seeds::stream(1, 0);
        assert_eq!(simulate_ic_once(&net, &[2], &mut rng).unwrap(), 3);
    }

    #[test]
    fn single_run_support() {
        let net = path(0.5);
        for s in 0..200 {
            let c = simulate_ic_once(&net, &[1], &mut seeds::stream(s, 0)).unwrap();
            assert!((1..=3).contains(&c));
        }
    }

    #[test]
    fn invalid_seeds_rejected() {
        let net = path(0.5);
        let mut rng = seeds::stream(0, 0);
        assert!(simulate_ic_once(&net, &[3], &mut rng).is_err());
        assert!(simulate_ic_once(&net, &[1, 1], &mut rng).is_err());
    }

    #[test]
    fn exact_values() {
        let single = Network::from_edges(2, &[(0, 1)], false, 0.3).unwrap();
        assert!((exact_spread_small(&single, &[0]).unwrap() - 1.3).abs() < 1e-12);
        assert!((exact_spread_small(&path(0.5), &[0]).unwrap() - 1.75).abs() < 1e-12);
        assert!((exact_spread_small(&path(0.5), &[1]).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(exact_spread_small(&path(0.0), &[0, 1]).unwrap(), 2.0);
    }

    #[test]
    fn exact_refuses_large_graphs() {
        let edges: Vec<_> = (0..21).map(|i| (i, i + 1)).collect();
        let net = Network::from_edges(22, &edges, false, 0.1).unwrap();
        assert!(matches!(exact_spread_small(&net, &[0]), Err(Error::TooLarge { edges: 21, .. })));
    }

    #[test]
    fn estimate_matches_exact_on_path() {
        let cfg = DiffusionConfig { replicas: 10_000, base_seed: 11 };
        let est = estimate_spread(&path(0.5), &[1], &cfg).unwrap();
        assert!((est.mean - 2.0).abs() <= 3.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn estimate_is_reproducible() {
        let cfg = DiffusionConfig { replicas: 1000, base_seed: 5 };
        let a = estimate_spread(&path(0.5), &[0], &cfg).unwrap();
        let b = estimate_spread(&path(0.5), &[0], &cfg).unwrap();
        assert_eq!(a, b);
    }
}
