//! Cheap spread proxies used as fitness functions during evolution.
//!
//! **EDV** (expected diffusion value) counts the seeds plus, for every
//! non-seed one-hop neighbour `b`, the chance `1 - (1-p)^δ(b)` that at least
//! one of the `δ(b)` seeds adjacent to it activates it.
//!
//! **TIS** (two-hop influence spread) is computed as
//!
//! ```text
//! TIS(A) = Σ_{a∈A} σ₂(a)
//!        − Σ_{a∈A} Σ_{b∈N(a)∩A} p(a,b)·(1 + α(b) − p(b,a))
//!        − Σ_{a∈A} Σ_{b∈N(a)∖A} Σ_{c∈N(b)∩A∖{a}} p(a,b)·p(b,c)
//!
//! σ₂(a) = 1 + Σ_{b∈N(a)} p(a,b)·(1 + α(b) − p(b,a))
//! α(b)  = Σ_{c∈N(b)} p(b,c)
//! ```
//!
//! The first term is the two-hop spread of each seed alone, the second removes
//! the branches that run through another seed, and the third removes two-hop
//! paths that end on another seed.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::diffusion::validate_seeds;
use crate::error::{Error, Result};
use crate::graph::{Network, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProxyKind {
    Edv,
    Tis,
}

impl ProxyKind {
    pub fn name(self) -> &'static str {
        match self {
            ProxyKind::Edv => "EDV",
            ProxyKind::Tis => "TIS",
        }
    }
}

impl std::str::FromStr for ProxyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "edv" => Ok(ProxyKind::Edv),
            "tis" => Ok(ProxyKind::Tis),
            other => Err(Error::config(format!("unknown transformation {other:?}"))),
        }
    }
}

/// EDV with the uniform probability `p`.
pub fn edv(net: &Network, seeds: &[NodeId], p: f64) -> Result<f64> {
    validate_seeds(net, seeds)?;
    Ok(edv_unchecked(net, seeds, p))
}

fn edv_unchecked(net: &Network, seeds: &[NodeId], p: f64) -> f64 {
    let mut sorted_seeds = seeds.to_vec();
    sorted_seeds.sort_unstable();
    let mut hits: Vec<NodeId> = seeds
        .iter()
        .flat_map(|&a| net.adj(a).iter().copied())
        .filter(|b| sorted_seeds.binary_search(b).is_err())
        .collect();
    hits.sort_unstable();
    let q = 1.0 - p;
    let mut total = seeds.len() as f64;
    let mut i = 0;
    while i < hits.len() {
        let mut j = i + 1;
        while j < hits.len() && hits[j] == hits[i] {
            j += 1;
        }
        total += 1.0 - q.powi((j - i) as i32);
        i = j;
    }
    total
}

/// One-hop influence of `b`: the sum of its outgoing arc probabilities.
pub fn one_hop_influence(net: &Network, b: NodeId) -> Result<f64> {
    net.neighbors(b)?;
    Ok(net.arcs(b).map(|(_, p)| p).sum())
}

fn alpha_table(net: &Network) -> Vec<f64> {
    (0..net.node_count() as NodeId).map(|b| net.arcs(b).map(|(_, p)| p).sum()).collect()
}

/// TIS using per-arc probabilities.
pub fn tis(net: &Network, seeds: &[NodeId]) -> Result<f64> {
    validate_seeds(net, seeds)?;
    Ok(tis_with(net, seeds, &alpha_table(net)))
}

fn tis_with(net: &Network, seeds: &[NodeId], alpha: &[f64]) -> f64 {
    let mut sorted_seeds = seeds.to_vec();
    sorted_seeds.sort_unstable();
    let is_seed = |v: NodeId| sorted_seeds.binary_search(&v).is_ok();

    let mut first = 0.0;
    let mut within = 0.0;
    let mut beta = 0.0;
    for &a in seeds {
        first += 1.0;
        for (b, pab) in net.arcs(a) {
            let branch = pab * (1.0 + alpha[b as usize] - net.prob(b, a));
            first += branch;
            if is_seed(b) {
                within += branch;
            } else {
                for (c, pbc) in net.arcs(b) {
                    if c != a && is_seed(c) {
                        beta += pab * pbc;
                    }
                }
            }
        }
    }
    first - within - beta
}

/// A proxy bound to a network, plus the evaluation budget the solver spends on it.
#[derive(Clone, Debug)]
pub struct Transformation {
    pub id: usize,
    pub kind: ProxyKind,
    budget: usize,
    consumed: usize,
    alpha: Option<Arc<[f64]>>,
}

impl Transformation {
    pub fn new(id: usize, kind: ProxyKind, net: &Network, budget: usize) -> Self {
        let alpha = match kind {
            ProxyKind::Tis => Some(alpha_table(net).into()),
            ProxyKind::Edv => None,
        };
        Transformation { id, kind, budget, consumed: 0, alpha }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Fitness of a seed set. Pure: does not touch the budget.
    /// Seeds must be valid and distinct.
    pub fn fitness(&self, net: &Network, seeds: &[NodeId]) -> f64 {
        match (&self.kind, &self.alpha) {
            (ProxyKind::Edv, _) => edv_unchecked(net, seeds, net.base_p()),
            (ProxyKind::Tis, Some(alpha)) => tis_with(net, seeds, alpha),
            (ProxyKind::Tis, None) => tis_with(net, seeds, &alpha_table(net)),
        }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.consumed
    }

    /// Records `n` evaluations. Fails without recording if that would overrun the budget.
    pub fn consume(&mut self, n: usize) -> Result<()> {
        if n > self.remaining() {
            return Err(Error::invalid(format!(
                "{} budget exhausted: {} requested, {} left",
                self.name(),
                n,
                self.remaining()
            )));
        }
        self.consumed += n;
        Ok(())
    }
}
