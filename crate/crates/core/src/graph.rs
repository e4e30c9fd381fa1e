//! Immutable social networks in compressed sparse row form.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = u32;

/// A network with contiguous node ids `0..n`. Neighbour lists are sorted,
/// free of self-loops and duplicates; undirected networks store both arcs.
#[derive(Clone, Debug)]
pub struct Network {
    name: String,
    directed: bool,
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    /// Per-arc probabilities aligned with `targets`; `None` means every arc uses `base_p`.
    probs: Option<Vec<f64>>,
    base_p: f64,
    labels: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BuildStats {
    pub self_loops: usize,
    pub duplicates: usize,
}

struct RawEdge {
    u: NodeId,
    v: NodeId,
    p: Option<f64>,
}

impl Network {
    /// Builds a network with a uniform propagation probability.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)], directed: bool, p: f64) -> Result<Self> {
        let raw = edges.iter().map(|&(u, v)| RawEdge { u, v, p: None }).collect();
        Self::build(n, raw, directed, p, default_labels(n), String::new()).map(|(net, _)| net)
    }

    /// Builds a network with one probability per edge.
    pub fn from_weighted_edges(n: usize, edges: &[(NodeId, NodeId, f64)], directed: bool, base_p: f64) -> Result<Self> {
        let raw = edges.iter().map(|&(u, v, p)| RawEdge { u, v, p: Some(p) }).collect();
        Self::build(n, raw, directed, base_p, default_labels(n), String::new()).map(|(net, _)| net)
    }

    fn build(
        n: usize,
        raw: Vec<RawEdge>,
        directed: bool,
        base_p: f64,
        labels: Vec<String>,
        name: String,
    ) -> Result<(Self, BuildStats)> {
        check_prob(base_p, true)?;
        if n > NodeId::MAX as usize {
            return Err(Error::invalid(format!("{n} nodes exceed the id range")));
        }
        let weighted = raw.iter().any(|e| e.p.is_some());
        let mut stats = BuildStats::default();
        let mut seen: HashSet<(NodeId, NodeId)> = HashSet::with_capacity(raw.len());
        let mut arcs: Vec<(NodeId, NodeId, f64)> = Vec::with_capacity(raw.len() * 2);
        for e in raw {
            for id in [e.u, e.v] {
                if id as usize >= n {
                    return Err(Error::NodeOutOfRange { id: id as usize, nodes: n });
                }
            }
            let p = e.p.unwrap_or(base_p);
            check_prob(p, true)?;
            if e.u == e.v {
                stats.self_loops += 1;
                continue;
            }
            let key = if directed || e.u < e.v { (e.u, e.v) } else { (e.v, e.u) };
            if !seen.insert(key) {
                stats.duplicates += 1;
                continue;
            }
            arcs.push((e.u, e.v, p));
            if !directed {
                arcs.push((e.v, e.u, p));
            }
        }
        arcs.sort_unstable_by_key(|&(u, v, _)| (u, v));

        let mut offsets = vec![0usize; n + 1];
        for &(u, _, _) in &arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = arcs.iter().map(|a| a.1).collect();
        let probs = weighted.then(|| arcs.iter().map(|a| a.2).collect());
        let net = Network { name, directed, offsets, targets, probs, base_p, labels };
        Ok((net, stats))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Copy of this network with every arc set to the uniform probability `p`.
    pub fn with_uniform_p(&self, p: f64) -> Result<Self> {
        check_prob(p, true)?;
        let mut net = self.clone();
        net.base_p = p;
        net.probs = None;
        Ok(net)
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of edges: arcs when directed, unordered pairs when undirected.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.targets.len()
        } else {
            self.targets.len() / 2
        }
    }

    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    /// The uniform probability from the network configuration.
    pub fn base_p(&self) -> f64 {
        self.base_p
    }

    pub fn has_edge_probs(&self) -> bool {
        self.probs.is_some()
    }

    fn check(&self, v: NodeId) -> Result<usize> {
        let v = v as usize;
        if v < self.node_count() {
            Ok(v)
        } else {
            Err(Error::NodeOutOfRange { id: v, nodes: self.node_count() })
        }
    }

    pub fn degree(&self, v: NodeId) -> Result<usize> {
        let v = self.check(v)?;
        Ok(self.offsets[v + 1] - self.offsets[v])
    }

    pub fn neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        let v = self.check(v)?;
        Ok(&self.targets[self.offsets[v]..self.offsets[v + 1]])
    }

    /// Unchecked neighbour slice; panics on an out-of-range id.
    #[inline]
    pub fn adj(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn deg(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Neighbours of `v` paired with the probability of the arc `v -> w`.
    #[inline]
    pub fn arcs(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let (lo, hi) = (self.offsets[v as usize], self.offsets[v as usize + 1]);
        (lo..hi).map(move |i| (self.targets[i], self.arc_prob(i)))
    }

    #[inline]
    fn arc_prob(&self, idx: usize) -> f64 {
        match &self.probs {
            Some(p) => p[idx],
            None => self.base_p,
        }
    }

    /// Probability of the arc `u -> v`, or 0 if there is no such arc.
    pub fn prob(&self, u: NodeId, v: NodeId) -> f64 {
        let lo = self.offsets[u as usize];
        match self.adj(u).binary_search(&v) {
            Ok(pos) => self.arc_prob(lo + pos),
            Err(_) => 0.0,
        }
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj(u).binary_search(&v).is_ok()
    }

    /// Edges as `(u, v, p)`; undirected edges are reported once with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.node_count() as NodeId)
            .flat_map(move |u| self.arcs(u).filter(move |&(v, _)| self.directed || u < v).map(move |(v, p)| (u, v, p)))
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v as usize]
    }

    /// Map from original label to compact id.
    pub fn label_index(&self) -> HashMap<&str, NodeId> {
        self.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i as NodeId)).collect()
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn check_prob(p: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero { (0.0..=1.0).contains(&p) } else { p > 0.0 && p <= 1.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(format!("probability {p} outside the allowed range")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadOptions {
    pub directed: bool,
    /// Probability for lines without a third column (and the EDV `p`).
    pub default_p: f64,
    /// Read a third column as the edge probability.
    pub weighted: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { directed: false, default_p: 0.05, weighted: false }
    }
}

#[derive(Debug)]
pub struct Loaded {
    pub network: Network,
    pub stats: BuildStats,
}

/// Reads a whitespace-separated edge list. Lines starting with `#` or `%`
/// are comments. Labels are compacted in first-appearance order.
pub fn load_edge_list<R: BufRead>(source: R, options: &LoadOptions) -> Result<Loaded> {
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut raw = Vec::new();
    let mut intern = |tok: &str, labels: &mut Vec<String>| -> NodeId {
        if let Some(&id) = index.get(tok) {
            return id;
        }
        let id = labels.len() as NodeId;
        index.insert(tok.to_string(), id);
        labels.push(tok.to_string());
        id
    };
    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let p = match (toks.len(), options.weighted) {
            (0 | 1, _) => {
                return Err(Error::Parse { line: lineno + 1, msg: format!("expected `u v [p]`, got {line:?}") })
            }
            (2, _) | (_, false) => None,
            (3, true) => {
                let p: f64 = toks[2]
                    .parse()
                    .map_err(|_| Error::Parse { line: lineno + 1, msg: format!("bad probability {:?}", toks[2]) })?;
                if !(p > 0.0 && p <= 1.0) {
                    return Err(Error::invalid(format!("line {}: probability {p} outside (0, 1]", lineno + 1)));
                }
                Some(p)
            }
            (_, true) => return Err(Error::Parse { line: lineno + 1, msg: format!("too many columns in {line:?}") }),
        };
        let u = intern(toks[0], &mut labels);
        let v = intern(toks[1], &mut labels);
        raw.push(RawEdge { u, v, p });
    }
    let n = labels.len();
    let (network, stats) = Network::build(n, raw, options.directed, options.default_p, labels, String::new())?;
    if stats.self_loops > 0 {
        log::warn!("dropped {} self-loop(s)", stats.self_loops);
    }
    Ok(Loaded { network, stats })
}

/// Writes the network in the format `load_edge_list` reads, using the
/// stored labels. A probability column is written only for per-edge networks.
pub fn write_edge_list<W: Write>(net: &Network, mut out: W) -> Result<()> {
    writeln!(
        out,
        "# {} nodes={} edges={} directed={} p={}",
        if net.name.is_empty() { "network" } else { &net.name },
        net.node_count(),
        net.edge_count(),
        net.directed,
        net.base_p
    )?;
    for (u, v, p) in net.edges() {
        if net.has_edge_probs() {
            writeln!(out, "{} {} {}", net.label(u), net.label(v), p)?;
        } else {
            writeln!(out, "{} {}", net.label(u), net.label(v))?;
        }
    }
    Ok(())
}

/// Parameters of the planted-partition (GN) benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GnParams {
    pub communities: usize,
    pub nodes: usize,
    pub degree: usize,
    /// Expected fraction of each node's stubs wired outside its community.
    pub mu: f64,
    /// Uniform propagation probability of the resulting network.
    pub p: f64,
}

impl GnParams {
    /// The benchmark used throughout the experiments: 4 x 32 nodes, degree 16,
    /// one inter-community link per node.
    pub fn standard(p: f64) -> Self {
        GnParams { communities: 4, nodes: 128, degree: 16, mu: Self::mu_from_out_links(1, 16), p }
    }

    /// Converts the integer "out-links per node" convention into a fraction.
    pub fn mu_from_out_links(out_links: usize, degree: usize) -> f64 {
        if degree == 0 {
            0.0
        } else {
            out_links as f64 / degree as f64
        }
    }
}

#[derive(Clone, Debug)]
pub struct GnNetwork {
    pub network: Network,
    /// Community of each node.
    pub community: Vec<u32>,
    /// Total absolute deviation of node degrees from the target.
    pub residual: usize,
}

impl GnNetwork {
    /// Number of edges whose endpoints lie in different communities.
    pub fn cut_size(&self) -> usize {
        self.network.edges().filter(|&(u, v, _)| self.community[u as usize] != self.community[v as usize]).count()
    }

    pub fn write_communities<W: Write>(&self, mut out: W) -> Result<()> {
        for (v, c) in self.community.iter().enumerate() {
            writeln!(out, "{} {}", self.network.label(v as NodeId), c)?;
        }
        Ok(())
    }
}

struct StubGraph {
    adj: Vec<HashSet<NodeId>>,
}

impl StubGraph {
    fn linked(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u as usize].contains(&v)
    }
    fn link(&mut self, u: NodeId, v: NodeId) {
        self.adj[u as usize].insert(v);
        self.adj[v as usize].insert(u);
    }
    fn unlink(&mut self, u: NodeId, v: NodeId) {
        self.adj[u as usize].remove(&v);
        self.adj[v as usize].remove(&u);
    }
}

/// Generates a GN-style community benchmark where every node has (as far as
/// the stub matching allows) exactly `degree` neighbours, of which an expected
/// fraction `mu` lie in other communities. Communities are contiguous id blocks.
pub fn generate_gn<R: Rng + ?Sized>(params: &GnParams, rng: &mut R) -> Result<GnNetwork> {
    let GnParams { communities, nodes, degree, mu, p } = *params;
    if communities == 0 || nodes == 0 {
        return Err(Error::Construction("nodes and communities must be positive".into()));
    }
    if nodes % communities != 0 {
        return Err(Error::Construction(format!("{nodes} nodes cannot be split into {communities} equal communities")));
    }
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Construction(format!("mixing parameter {mu} outside [0, 1]")));
    }
    let size = nodes / communities;
    let max_in = size - 1;
    let max_out = nodes - size;
    if degree > max_in + max_out {
        return Err(Error::Construction(format!("degree {degree} infeasible with {nodes} nodes")));
    }
    let comm = |v: NodeId| v as usize / size;

    let target_out = mu * degree as f64;
    let base_out = target_out.floor() as usize;
    let frac = target_out - base_out as f64;
    let mut in_stubs = vec![0usize; nodes];
    let mut out_stubs = vec![0usize; nodes];
    for v in 0..nodes {
        let mut out = base_out + usize::from(frac > 0.0 && rng.gen::<f64>() < frac);
        out = out.min(degree);
        let mut inn = degree - out;
        if inn > max_in {
            out += inn - max_in;
            inn = max_in;
        }
        if out > max_out {
            inn += out - max_out;
            out = max_out;
        }
        if inn > max_in {
            return Err(Error::Construction(format!("degree {degree} infeasible for mixing {mu}")));
        }
        in_stubs[v] = inn;
        out_stubs[v] = out;
    }

    let mut g = StubGraph { adj: vec![HashSet::new(); nodes] };
    let mut intra_edges = Vec::new();
    for c in 0..communities {
        let stubs: Vec<NodeId> =
            (c * size..(c + 1) * size).flat_map(|v| std::iter::repeat_n(v as NodeId, in_stubs[v])).collect();
        let same = |a: NodeId, b: NodeId| comm(a) == comm(b);
        match_stubs(stubs, &mut g, &mut intra_edges, &same, rng);
    }
    let stubs: Vec<NodeId> = (0..nodes).flat_map(|v| std::iter::repeat_n(v as NodeId, out_stubs[v])).collect();
    let mut inter_edges = Vec::new();
    let cross = |a: NodeId, b: NodeId| comm(a) != comm(b);
    match_stubs(stubs, &mut g, &mut inter_edges, &cross, rng);

    let mut edges: Vec<(NodeId, NodeId)> = intra_edges;
    edges.extend(inter_edges);
    let mut community = vec![0u32; nodes];
    for (v, c) in community.iter_mut().enumerate() {
        *c = comm(v as NodeId) as u32;
    }
    let network =
        Network::from_edges(nodes, &edges, false, p)?.with_name(format!("gn-c{communities}-n{nodes}-d{degree}-mu{mu}"));
    let residual = (0..nodes as NodeId).map(|v| network.deg(v).abs_diff(degree)).sum();
    if residual > 0 {
        log::warn!("GN generator left a residual degree deviation of {residual}");
    }
    Ok(GnNetwork { network, community, residual })
}

/// Randomly pairs stubs subject to `allowed`, then repairs unmatched stubs by
/// degree-preserving rewiring of an existing edge of the same class.
fn match_stubs<R, F>(
    mut stubs: Vec<NodeId>,
    g: &mut StubGraph,
    edges: &mut Vec<(NodeId, NodeId)>,
    allowed: &F,
    rng: &mut R,
) where
    R: Rng + ?Sized,
    F: Fn(NodeId, NodeId) -> bool,
{
    stubs.shuffle(rng);
    let mut leftover = Vec::new();
    while let Some(u) = stubs.pop() {
        let partner = stubs.iter().rposition(|&v| v != u && allowed(u, v) && !g.linked(u, v));
        match partner {
            Some(j) => {
                let v = stubs.swap_remove(j);
                g.link(u, v);
                edges.push((u, v));
            }
            None => leftover.push(u),
        }
    }

    const ATTEMPTS: usize = 2000;
    while leftover.len() >= 2 {
        let a = leftover.pop().unwrap();
        let b = leftover.pop().unwrap();
        if a != b && allowed(a, b) && !g.linked(a, b) {
            g.link(a, b);
            edges.push((a, b));
            continue;
        }
        let mut done = false;
        for _ in 0..ATTEMPTS {
            if edges.is_empty() {
                break;
            }
            let idx = rng.gen_range(0..edges.len());
            let (x0, y0) = edges[idx];
            for (x, y) in [(x0, y0), (y0, x0)] {
                if x == a || x == b || y == a || y == b {
                    continue;
                }
                if allowed(a, x) && allowed(b, y) && !g.linked(a, x) && !g.linked(b, y) && (a != b || x != y) {
                    g.unlink(x, y);
                    edges.swap_remove(idx);
                    g.link(a, x);
                    g.link(b, y);
                    edges.push((a, x));
                    edges.push((b, y));
                    done = true;
                    break;
                }
            }
            if done {
                break;
            }
        }
        if !done {
            log::debug!("could not place stubs of nodes {a} and {b}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;

    fn load(text: &str, opts: LoadOptions) -> Result<Loaded> {
        load_edge_list(text.as_bytes(), &opts)
    }

    #[test]
    fn load_path_undirected() {
        let l = load("a b\nb c\n", LoadOptions { default_p: 0.5, ..Default::default() }).unwrap();
        let net = l.network;
        assert_eq!(net.node_count(), 3);
        assert_eq!(net.edge_count(), 2);
        assert_eq!(net.neighbors(1).unwrap(), &[0, 2]);
        assert_eq!(net.label(1), "b");
        assert_eq!(net.prob(0, 1), 0.5);
    }

    #[test]
    fn self_loop_dropped() {
        let l = load("a a\n", LoadOptions::default()).unwrap();
        assert_eq!(l.network.edge_count(), 0);
        assert_eq!(l.stats.self_loops, 1);
        assert_eq!(l.network.node_count(), 1);
    }

    #[test]
    fn duplicates_collapse_in_both_orientations() {
        let l = load("a b\nb a\na b\n", LoadOptions::default()).unwrap();
        assert_eq!(l.network.edge_count(), 1);
        assert_eq!(l.stats.duplicates, 2);
        let d = load("a b\nb a\n", LoadOptions { directed: true, ..Default::default() }).unwrap();
        assert_eq!(d.network.edge_count(), 2);
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = load("# header\na b\nc\n", LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn bad_probability_rejected() {
        let opts = LoadOptions { weighted: true, ..Default::default() };
        assert!(matches!(load("a b 1.5\n", opts), Err(Error::Invalid(_))));
        assert!(matches!(load("a b 0\n", opts), Err(Error::Invalid(_))));
        assert!(matches!(load("a b x\n", opts), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn weighted_probabilities_kept_per_arc() {
        let opts = LoadOptions { weighted: true, default_p: 0.1, ..Default::default() };
        let net = load("a b 0.4\nb c\n", opts).unwrap().network;
        assert_eq!(net.prob(0, 1), 0.4);
        assert_eq!(net.prob(1, 0), 0.4);
        assert_eq!(net.prob(1, 2), 0.1);
        assert_eq!(net.prob(0, 2), 0.0);
        assert_eq!(net.base_p(), 0.1);
    }

    #[test]
    fn degree_and_neighbors() {
        let star = Network::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], false, 0.1).unwrap();
        assert_eq!(star.degree(0).unwrap(), 4);
        let iso = Network::from_edges(2, &[], false, 0.1).unwrap();
        assert_eq!(iso.degree(1).unwrap(), 0);
        let path = Network::from_edges(3, &[(0, 1), (1, 2)], false, 0.1).unwrap();
        assert_eq!(path.neighbors(0).unwrap(), &[1]);
        assert!(matches!(path.degree(3), Err(Error::NodeOutOfRange { id: 3, nodes: 3 })));
        assert!(path.neighbors(9).is_err());
    }

    #[test]
    fn write_then_load_reproduces_adjacency() {
        let text = "x y 0.25\ny z 0.5\nz x 0.75\nw x 0.125\n";
        let opts = LoadOptions { weighted: true, ..Default::default() };
        let a = load(text, opts).unwrap().network;
        let mut buf = Vec::new();
        write_edge_list(&a, &mut buf).unwrap();
        let b = load(std::str::from_utf8(&buf).unwrap(), opts).unwrap().network;
        let ia = a.label_index();
        for (u, v, p) in b.edges() {
            let (ua, va) = (ia[b.label(u)], ia[b.label(v)]);
            assert_eq!(a.prob(ua, va), p);
        }
        assert_eq!(a.edge_count(), b.edge_count());
    }

    #[test]
    fn gn_standard_is_regular() {
        let mut rng = seeds::stream(1, 0);
        let gn = generate_gn(&GnParams::standard(0.05), &mut rng).unwrap();
        let net = &gn.network;
        assert_eq!(net.node_count(), 128);
        assert_eq!(gn.residual, 0);
        assert!((0..128).all(|v| net.degree(v).unwrap() == 16));
        assert_eq!(net.arc_count(), 128 * 16);
        // one out-link per node
        assert_eq!(gn.cut_size(), 64);
    }

    #[test]
    fn gn_zero_mixing_has_empty_cut() {
        let mut rng = seeds::stream(3, 0);
        let p = GnParams { communities: 2, nodes: 8, degree: 3, mu: 0.0, p: 0.1 };
        let gn = generate_gn(&p, &mut rng).unwrap();
        assert_eq!(gn.cut_size(), 0);
        assert_eq!(gn.residual, 0);
        // two disjoint K4 blocks
        assert_eq!(gn.network.edge_count(), 12);
    }

    #[test]
    fn gn_is_deterministic() {
        let p = GnParams { mu: 0.3, ..GnParams::standard(0.05) };
        let a = generate_gn(&p, &mut seeds::stream(9, 0)).unwrap();
        let b = generate_gn(&p, &mut seeds::stream(9, 0)).unwrap();
        let ea: Vec<_> = a.network.edges().collect();
        let eb: Vec<_> = b.network.edges().collect();
        assert_eq!(ea, eb);
    }

    #[test]
    fn gn_rejects_infeasible() {
        let mut rng = seeds::stream(0, 0);
        let bad = GnParams { communities: 3, nodes: 128, degree: 16, mu: 0.1, p: 0.1 };
        assert!(generate_gn(&bad, &mut rng).is_err());
        let bad = GnParams { communities: 2, nodes: 8, degree: 8, mu: 0.0, p: 0.1 };
        assert!(generate_gn(&bad, &mut rng).is_err());
        let bad = GnParams { communities: 2, nodes: 8, degree: 9, mu: 0.5, p: 0.1 };
        assert!(generate_gn(&bad, &mut rng).is_err());
    }

    #[test]
    fn gn_mu_fraction_tracks_cut() {
        let p = GnParams { mu: 0.25, ..GnParams::standard(0.05) };
        let gn = generate_gn(&p, &mut seeds::stream(5, 0)).unwrap();
        let frac = gn.cut_size() as f64 * 2.0 / (128.0 * 16.0);
        assert!((frac - 0.25).abs() < 0.02, "{frac}");
    }
}
