//! Shared fixtures and brute-force oracles for the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use mtefim::graph::{Network, NodeId};
use mtefim::seeds;
use rand::Rng;

/// Random simple graph: each pair joined with probability `density`, edges
/// capped at `max_edges`. Per-edge probabilities are drawn from [0.05, 0.95]
/// when `weighted`, else every edge uses `p`.
#[derive(Debug, Clone)]
pub struct RandomGraph {
    pub n: usize,
    pub edges: Vec<(NodeId, NodeId, f64)>,
    pub directed: bool,
}

impl RandomGraph {
    pub fn generate(seed: u64, n: usize, density: f64, max_edges: usize, p: Option<f64>, directed: bool) -> Self {
        let mut rng = seeds::stream(seed, 0);
        let mut edges = Vec::new();
        for u in 0..n as NodeId {
            for v in 0..n as NodeId {
                if u == v || (!directed && v < u) {
                    continue;
                }
                if edges.len() < max_edges && rng.gen::<f64>() < density {
                    let w = p.unwrap_or_else(|| rng.gen_range(0.05..0.95));
                    edges.push((u, v, w));
                }
            }
        }
        RandomGraph { n, edges, directed }
    }

    pub fn network(&self) -> Network {
        let base = self.edges.first().map(|e| e.2).unwrap_or(0.1);
        Network::from_weighted_edges(self.n, &self.edges, self.directed, base).unwrap()
    }

    /// Dense arc probability matrix; undirected edges fill both directions.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.n]; self.n];
        for &(u, v, w) in &self.edges {
            m[u as usize][v as usize] = w;
            if !self.directed {
                m[v as usize][u as usize] = w;
            }
        }
        m
    }
}

/// All k-subsets of 0..n in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<NodeId>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v as NodeId);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Expected diffusion value written directly from its definition.
pub fn edv_literal(m: &[Vec<f64>], seeds: &[NodeId], p: f64) -> f64 {
    let n = m.len();
    let in_a = |v: usize| seeds.iter().any(|&s| s as usize == v);
    let mut total = seeds.len() as f64;
    for b in 0..n {
        if in_a(b) {
            continue;
        }
        let delta = seeds.iter().filter(|&&a| m[a as usize][b] > 0.0).count();
        if delta > 0 {
            total += 1.0 - (1.0 - p).powi(delta as i32);
        }
    }
    total
}

/// Two-hop influence spread by nested loops over the probability matrix.
pub fn tis_literal(m: &[Vec<f64>], seeds: &[NodeId]) -> f64 {
    let n = m.len();
    let in_a = |v: usize| seeds.iter().any(|&s| s as usize == v);
    let alpha: Vec<f64> = (0..n).map(|b| (0..n).map(|c| m[b][c]).sum()).collect();
    let mut first = 0.0;
    let mut within = 0.0;
    let mut beta = 0.0;
    for &a in seeds {
        let a = a as usize;
        first += 1.0;
        for b in 0..n {
            if m[a][b] == 0.0 {
                continue;
            }
            let branch = m[a][b] * (1.0 + alpha[b] - m[b][a]);
            first += branch;
            if in_a(b) {
                within += branch;
            }
        }
        for b in 0..n {
            if m[a][b] == 0.0 || in_a(b) {
                continue;
            }
            for c in 0..n {
                if c != a && in_a(c) && m[b][c] > 0.0 {
                    beta += m[a][b] * m[b][c];
                }
            }
        }
    }
    first - within - beta
}

/// Exact IC spread by enumerating every live-edge world.
pub fn ic_worlds(g: &RandomGraph, seeds: &[NodeId]) -> f64 {
    let e = g.edges.len();
    assert!(e <= 20);
    let mut total = 0.0;
    for mask in 0u32..(1 << e) {
        let mut weight = 1.0;
        let mut adj = vec![Vec::new(); g.n];
        for (i, &(u, v, w)) in g.edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                weight *= w;
                adj[u as usize].push(v as usize);
                if !g.directed {
                    adj[v as usize].push(u as usize);
                }
            } else {
                weight *= 1.0 - w;
            }
        }
        let mut seen = vec![false; g.n];
        let mut stack: Vec<usize> = seeds.iter().map(|&s| s as usize).collect();
        for &s in &stack {
            seen[s] = true;
        }
        let mut reached = stack.len();
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    stack.push(v);
                }
            }
        }
        total += weight * reached as f64;
    }
    total
}

/// Random distinct seed set of size `k`.
pub fn random_seeds<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<NodeId> {
    rand::seq::index::sample(rng, n, k).into_iter().map(|v| v as NodeId).collect()
}
