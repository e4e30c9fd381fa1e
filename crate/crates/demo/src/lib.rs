//! WebAssembly bindings for the browser demo. All calls exchange JSON strings;
//! the `*_json` functions hold the logic and are usable natively.

use mtefim::diffusion::{estimate_spread, DiffusionConfig};
use mtefim::graph::{generate_gn, GnParams, Network, NodeId};
use mtefim::mtefim::{solve, SolverConfig};
use mtefim::proxy::{edv, tis, ProxyKind};
use mtefim::seeds;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Debug, Deserialize)]
#[serde(default)]
pub struct GraphRequest {
    pub communities: usize,
    pub nodes: usize,
    pub degree: usize,
    pub out_links: usize,
    pub p: f64,
    pub seed: u64,
}

impl Default for GraphRequest {
    fn default() -> Self {
        GraphRequest { communities: 4, nodes: 128, degree: 16, out_links: 1, p: 0.05, seed: 1 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default)]
pub struct SolveRequest {
    pub k: usize,
    pub population: usize,
    pub evaluations: usize,
    pub transfer: bool,
    pub seed: u64,
    pub replicas: usize,
}

impl Default for SolveRequest {
    fn default() -> Self {
        SolveRequest { k: 10, population: 50, evaluations: 4000, transfer: true, seed: 0, replicas: 2000 }
    }
}

#[derive(Serialize)]
struct GraphView<'a> {
    nodes: usize,
    edges: Vec<[NodeId; 2]>,
    community: &'a [u32],
    /// Points in the unit square, communities on a ring.
    positions: Vec<[f64; 2]>,
    cut: usize,
}

#[derive(Serialize)]
struct Scores {
    edv: f64,
    tis: f64,
    mean: f64,
    std_error: f64,
}

#[derive(Serialize)]
struct SolveView {
    seeds: Vec<NodeId>,
    chosen: &'static str,
    mean: f64,
    std_error: f64,
    evals: Vec<usize>,
    best_edv: Vec<f64>,
    best_tis: Vec<f64>,
    r: Vec<f64>,
    transferred: Vec<usize>,
}

/// A generated network held between calls.
#[wasm_bindgen]
pub struct Demo {
    net: Network,
    community: Vec<u32>,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

impl Demo {
    pub fn from_json(request: &str) -> Result<Demo, String> {
        let req: GraphRequest = serde_json::from_str(request).map_err(err)?;
        let params = GnParams {
            communities: req.communities,
            nodes: req.nodes,
            degree: req.degree,
            mu: GnParams::mu_from_out_links(req.out_links, req.degree),
            p: req.p,
        };
        let gn = generate_gn(&params, &mut seeds::stream(req.seed, 0)).map_err(err)?;
        Ok(Demo { net: gn.network, community: gn.community })
    }

    pub fn graph_json(&self) -> String {
        let groups = self.community.iter().max().map_or(1, |&c| c as usize + 1);
        let size = self.net.node_count().div_ceil(groups).max(1);
        let tau = std::f64::consts::TAU;
        let positions = (0..self.net.node_count())
            .map(|v| {
                let c = self.community[v] as f64;
                let slot = (v % size) as f64;
                let (cx, cy) = if groups == 1 {
                    (0.5, 0.5)
                } else {
                    let a = tau * c / groups as f64;
                    (0.5 + 0.28 * a.cos(), 0.5 + 0.28 * a.sin())
                };
                let b = tau * slot / size as f64;
                let radius = if groups == 1 { 0.42 } else { 0.17 };
                [cx + radius * b.cos(), cy + radius * b.sin()]
            })
            .collect();
        let edges: Vec<[NodeId; 2]> = self.net.edges().map(|(u, v, _)| [u, v]).collect();
        let cut = edges.iter().filter(|[u, v]| self.community[*u as usize] != self.community[*v as usize]).count();
        serde_json::to_string(&GraphView {
            nodes: self.net.node_count(),
            edges,
            community: &self.community,
            positions,
            cut,
        })
        .expect("serializable")
    }

    pub fn evaluate_json(&self, seed_set: &str, replicas: usize, seed: u64) -> Result<String, String> {
        let s: Vec<NodeId> = serde_json::from_str(seed_set).map_err(err)?;
        if s.is_empty() {
            return serde_json::to_string(&Scores { edv: 0.0, tis: 0.0, mean: 0.0, std_error: 0.0 }).map_err(err);
        }
        let est = estimate_spread(&self.net, &s, &DiffusionConfig { replicas, base_seed: seed }).map_err(err)?;
        let scores = Scores {
            edv: edv(&self.net, &s, self.net.base_p()).map_err(err)?,
            tis: tis(&self.net, &s).map_err(err)?,
            mean: est.mean,
            std_error: est.std_error,
        };
        serde_json::to_string(&scores).map_err(err)
    }

    pub fn solve_json(&self, request: &str) -> Result<String, String> {
        let req: SolveRequest = serde_json::from_str(request).map_err(err)?;
        let mut cfg = SolverConfig::new(req.k);
        cfg.population_size = req.population;
        cfg.max_evaluations = Some(req.evaluations);
        cfg.transfer_enabled = req.transfer;
        cfg.base_seed = req.seed;
        let kinds = [ProxyKind::Edv, ProxyKind::Tis];
        let sol = solve(&self.net, &kinds, &cfg).map_err(err)?;
        let est = estimate_spread(
            &self.net,
            &sol.seeds,
            &DiffusionConfig { replicas: req.replicas, base_seed: seeds::derive(req.seed, &[1]) },
        )
        .map_err(err)?;
        let records = &sol.outcome.trace.records;
        let view = SolveView {
            seeds: sol.seeds,
            chosen: kinds[sol.soss.chosen].name(),
            mean: est.mean,
            std_error: est.std_error,
            evals: records.iter().map(|r| r.evals.iter().sum()).collect(),
            best_edv: records.iter().map(|r| r.best[0]).collect(),
            best_tis: records.iter().map(|r| r.best[1]).collect(),
            r: records.iter().map(|r| r.r[0]).collect(),
            transferred: records.iter().map(|r| r.transferred.iter().sum()).collect(),
        };
        serde_json::to_string(&view).map_err(err)
    }
}

#[wasm_bindgen]
impl Demo {
    /// Generates a GN network from a JSON request (all fields optional).
    #[wasm_bindgen(constructor)]
    pub fn new(request: &str) -> Result<Demo, JsError> {
        Demo::from_json(request).map_err(|e| JsError::new(&e))
    }

    /// Nodes, edges, communities and a layout.
    pub fn graph(&self) -> String {
        self.graph_json()
    }

    /// EDV, TIS and a Monte Carlo spread estimate for a JSON array of node ids.
    pub fn evaluate(&self, seed_set: &str, replicas: usize, seed: u32) -> Result<String, JsError> {
        self.evaluate_json(seed_set, replicas, seed as u64).map_err(|e| JsError::new(&e))
    }

    /// Runs the two-proxy solver and returns its convergence trace.
    pub fn solve(&self, request: &str) -> Result<String, JsError> {
        self.solve_json(request).map_err(|e| JsError::new(&e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn small() -> Demo {
        Demo::from_json(r#"{"nodes": 32, "communities": 2, "degree": 4}"#).unwrap()
    }

    #[test]
    fn graph_view_shape() {
        let g: Value = serde_json::from_str(&small().graph_json()).unwrap();
        assert_eq!(g["nodes"], 32);
        assert_eq!(g["edges"].as_array().unwrap().len(), 64);
        assert_eq!(g["positions"].as_array().unwrap().len(), 32);
        assert_eq!(g["cut"], 16);
        for p in g["positions"].as_array().unwrap() {
            for c in p.as_array().unwrap() {
                assert!((0.0..=1.0).contains(&c.as_f64().unwrap()));
            }
        }
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(Demo::from_json(r#"{"nodes": 30, "communities": 4}"#).is_err());
        assert!(Demo::from_json("not json").is_err());
        assert!(small().evaluate_json("[99]", 10, 0).is_err());
    }

    #[test]
    fn evaluate_scores() {
        let d = small();
        let v: Value = serde_json::from_str(&d.evaluate_json("[0, 5]", 500, 1).unwrap()).unwrap();
        let mean = v["mean"].as_f64().unwrap();
        assert!(mean >= 2.0 && v["edv"].as_f64().unwrap() >= 2.0);
        let empty: Value = serde_json::from_str(&d.evaluate_json("[]", 500, 1).unwrap()).unwrap();
        assert_eq!(empty["mean"], 0.0);
    }

    #[test]
    fn solve_trace_is_consistent() {
        let d = small();
        let out = d.solve_json(r#"{"k": 4, "population": 20, "evaluations": 800, "replicas": 200}"#).unwrap();
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["seeds"].as_array().unwrap().len(), 4);
        let best: Vec<f64> = v["best_edv"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert!(best.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(out, d.solve_json(r#"{"k": 4, "population": 20, "evaluations": 800, "replicas": 200}"#).unwrap());
    }
}
