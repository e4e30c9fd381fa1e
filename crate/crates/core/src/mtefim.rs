//! The multi-transformation solver.
//!
//! One population per transformation evolves under its own proxy. Each
//! generation the pairwise seed overlap between populations is measured;
//! every population may then receive the top offspring of its most related
//! peer, with probability and volume both equal to that relationship.
//! The final seed set is chosen among the per-transformation winners by
//! preference-weighted cumulative rank (SOSS) or by Monte Carlo (MCSS).

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bench::stats::average_ranks;
use crate::diffusion::{estimate_spread, DiffusionConfig, SpreadEstimate};
use crate::error::{Error, Result};
use crate::evo::{self, Individual, Population};
use crate::graph::Network;
use crate::proxy::{ProxyKind, Transformation};
use crate::seeds;

/// Symmetric `S x S` matrix of population overlaps in `[0, 1]`; the diagonal is 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationshipMatrix {
    size: usize,
    values: Vec<f64>,
}

impl RelationshipMatrix {
    pub fn zeros(size: usize) -> Self {
        RelationshipMatrix { size, values: vec![0.0; size * size] }
    }

    /// Builds a matrix from the upper triangle given row by row.
    pub fn from_upper(size: usize, upper: &[f64]) -> Result<Self> {
        if upper.len() != size * size.saturating_sub(1) / 2 {
            return Err(Error::invalid("upper triangle has the wrong length"));
        }
        let mut m = Self::zeros(size);
        let mut it = upper.iter();
        for i in 0..size {
            for j in i + 1..size {
                let &r = it.next().unwrap();
                if !(0.0..=1.0).contains(&r) {
                    return Err(Error::invalid(format!("relationship {r} outside [0, 1]")));
                }
                m.set(i, j, r);
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    fn set(&mut self, i: usize, j: usize, r: f64) {
        self.values[i * self.size + j] = r;
        self.values[j * self.size + i] = r;
    }

    /// `argmax_{j != i} r_ij`, lowest index on ties.
    pub fn most_related(&self, i: usize) -> Option<(usize, f64)> {
        (0..self.size).filter(|&j| j != i).fold(None, |best, j| match best {
            Some((_, r)) if r >= self.get(i, j) => best,
            _ => Some((j, self.get(i, j))),
        })
    }

    /// Entries above the diagonal, row major.
    pub fn upper(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..self.size {
            for j in i + 1..self.size {
                out.push(self.get(i, j));
            }
        }
        out
    }
}

fn sorted_overlap(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// `r_ij` = total seed overlap over all cross-population pairs divided by `k·N·N`.
pub fn estimate_relationship(populations: &[Population], k: usize) -> Result<RelationshipMatrix> {
    let s = populations.len();
    let n = populations.first().map_or(0, Population::len);
    if n == 0 || k == 0 {
        return Err(Error::invalid("relationship needs non-empty populations and k >= 1"));
    }
    let mut sets = Vec::with_capacity(s);
    for pop in populations {
        if pop.len() != n {
            return Err(Error::invalid("populations differ in size"));
        }
        if pop.members.iter().any(|m| m.len() != k) {
            return Err(Error::invalid(format!("genome length differs from k = {k}")));
        }
        sets.push(pop.members.iter().map(Individual::seed_set).collect::<Vec<_>>());
    }
    let mut m = RelationshipMatrix::zeros(s);
    for i in 0..s {
        for j in i + 1..s {
            let total: usize =
                sets[i].iter().map(|a| sets[j].iter().map(|b| sorted_overlap(a, b)).sum::<usize>()).sum();
            m.set(i, j, total as f64 / (k * n * n) as f64);
        }
    }
    Ok(m)
}

/// `⌊n·r⌋`. The epsilon keeps ratios such as `c / (k·N²)` from rounding a hair
/// below an integer.
pub fn transfer_count(n: usize, r: f64) -> usize {
    (n as f64 * r + 1e-9).floor() as usize
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferEvent {
    pub generation: usize,
    pub target: usize,
    pub source: usize,
    pub r: f64,
    pub draw: f64,
    pub fired: bool,
    /// Slots of the target offspring that were overwritten.
    pub positions: Vec<usize>,
}

impl TransferEvent {
    pub fn replaced(&self) -> usize {
        self.positions.len()
    }
}

/// For every active target `i`, draws `u ~ U(0,1)` and, if `u < r_{i,p}` where
/// `p` is the most related peer, copies the `⌊N·r_{i,p}⌋` fittest members of
/// `donors[p]` into that many distinct random slots of `offspring[i]`.
/// A transfer whose size exceeds `caps[i]` is skipped. Copies arrive without fitness.
pub fn transfer<R: Rng + ?Sized>(
    offspring: &mut [Population],
    donors: &[Population],
    r: &RelationshipMatrix,
    active: &[bool],
    caps: &[usize],
    generation: usize,
    rng: &mut R,
) -> Vec<TransferEvent> {
    let mut events = Vec::new();
    for i in 0..offspring.len() {
        if !active[i] {
            continue;
        }
        let Some((p, rip)) = r.most_related(i) else { continue };
        let draw: f64 = rng.gen();
        let n = offspring[i].len();
        let m = transfer_count(n, rip).min(donors[p].len());
        let fired = draw < rip && m > 0 && m <= caps[i];
        let mut event = TransferEvent { generation, target: i, source: p, r: rip, draw, fired, positions: Vec::new() };
        if fired {
            let mut ranked: Vec<&Individual> = donors[p].members.iter().collect();
            ranked.sort_by(|a, b| {
                b.fitness().unwrap_or(f64::NEG_INFINITY).total_cmp(&a.fitness().unwrap_or(f64::NEG_INFINITY))
            });
            let positions = index::sample(rng, n, m).into_vec();
            for (slot, donor) in positions.iter().zip(ranked) {
                let mut copy = donor.clone();
                copy.clear_fitness();
                offspring[i].members[*slot] = copy;
            }
            event.positions = positions;
        }
        events.push(event);
    }
    events
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub population_size: usize,
    pub k: usize,
    /// Total evaluation budget across all transformations; 5000·S when unset.
    pub max_evaluations: Option<usize>,
    pub pc: f64,
    /// Mutation rate; 1/k when unset.
    pub pm: Option<f64>,
    /// SOSS preferences; 1/S each when unset.
    pub prefs: Option<Vec<f64>>,
    pub base_seed: u64,
    pub transfer_enabled: bool,
}

pub const EVALS_PER_TRANSFORMATION: usize = 5000;

impl SolverConfig {
    pub fn new(k: usize) -> Self {
        SolverConfig {
            population_size: 100,
            k,
            max_evaluations: None,
            pc: 1.0,
            pm: None,
            prefs: None,
            base_seed: 0,
            transfer_enabled: true,
        }
    }

    pub fn total_budget(&self, s: usize) -> usize {
        self.max_evaluations.unwrap_or(EVALS_PER_TRANSFORMATION * s)
    }

    pub fn mutation_rate(&self) -> f64 {
        self.pm.unwrap_or(1.0 / self.k as f64)
    }

    pub fn preferences(&self, s: usize) -> Vec<f64> {
        self.prefs.clone().unwrap_or_else(|| vec![1.0 / s as f64; s])
    }

    pub fn validate(&self, s: usize, net: &Network) -> Result<()> {
        if s == 0 {
            return Err(Error::config("at least one transformation is required"));
        }
        if self.k == 0 || self.k > net.node_count() {
            return Err(Error::config(format!("k = {} must be in 1..={}", self.k, net.node_count())));
        }
        if self.population_size < 2 {
            return Err(Error::config("population size must be at least 2"));
        }
        if self.total_budget(s) < s * self.population_size {
            return Err(Error::config(format!(
                "budget {} below S·N = {}",
                self.total_budget(s),
                s * self.population_size
            )));
        }
        if !(0.0..=1.0).contains(&self.pc) || !(0.0..=1.0).contains(&self.mutation_rate()) {
            return Err(Error::config("pc and pm must lie in [0, 1]"));
        }
        validate_prefs(&self.preferences(s), s)
    }
}

pub fn validate_prefs(prefs: &[f64], s: usize) -> Result<()> {
    if prefs.len() != s {
        return Err(Error::config(format!("{} preferences for {s} transformations", prefs.len())));
    }
    if prefs.iter().any(|&c| !(c > 0.0 && c <= 1.0)) {
        return Err(Error::config("each preference must lie in (0, 1]"));
    }
    let sum: f64 = prefs.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::config(format!("preferences sum to {sum}, not 1")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Cumulative evaluations per transformation.
    pub evals: Vec<usize>,
    pub best: Vec<f64>,
    /// Upper triangle of the relationship matrix used in this generation.
    pub r: Vec<f64>,
    pub transferred: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunTrace {
    pub transformations: Vec<ProxyKind>,
    pub records: Vec<GenerationRecord>,
    pub transfers: Vec<TransferEvent>,
}

impl RunTrace {
    /// CSV with columns `generation, evals_i…, best_i…, r_ij…, transferred_i…`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let s = self.transformations.len();
        let names: Vec<String> = self.transformations.iter().map(|k| k.name().to_lowercase()).collect();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["generation".to_string()];
        header.extend(names.iter().map(|n| format!("evals_{n}")));
        header.extend(names.iter().map(|n| format!("best_{n}")));
        for i in 0..s {
            for j in i + 1..s {
                header.push(format!("r_{}_{}", names[i], names[j]));
            }
        }
        header.extend(names.iter().map(|n| format!("transferred_{n}")));
        w.write_record(&header)?;
        for rec in &self.records {
            let mut row = vec![rec.generation.to_string()];
            row.extend(rec.evals.iter().map(ToString::to_string));
            row.extend(rec.best.iter().map(ToString::to_string));
            row.extend(rec.r.iter().map(ToString::to_string));
            row.extend(rec.transferred.iter().map(ToString::to_string));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    /// Best final individual of each transformation.
    pub best: Vec<Individual>,
    pub trace: RunTrace,
    pub transformations: Vec<Transformation>,
    pub populations: Vec<Population>,
}

const TAG_INIT: u64 = 1;
const TAG_OFFSPRING: u64 = 2;
const TAG_TRANSFER: u64 = 3;

/// Fills in missing fitness values; returns the number of evaluations performed.
fn evaluate(pop: &mut Population, t: &Transformation, net: &Network) -> usize {
    let eval = |m: &mut Individual| -> usize {
        if m.fitness().is_some() {
            return 0;
        }
        let f = t.fitness(net, m.genome());
        m.set_fitness(f);
        1
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        pop.members.par_iter_mut().map(eval).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        pop.members.iter_mut().map(eval).sum()
    }
}

fn for_each_index<T, F>(items: &mut [T], f: F) -> Result<()>
where
    T: Send,
    F: Fn(usize, &mut T) -> Result<()> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter_mut().enumerate().try_for_each(|(i, t)| f(i, t))
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter_mut().enumerate().try_for_each(|(i, t)| f(i, t))
    }
}

/// Co-evolves one population per entry of `kinds` until every
/// transformation has spent its share `MFE / S` of the budget.
pub fn run(net: &Network, kinds: &[ProxyKind], cfg: &SolverConfig) -> Result<RunOutcome> {
    let s = kinds.len();
    cfg.validate(s, net)?;
    let n = cfg.population_size;
    let share = cfg.total_budget(s) / s;
    let pm = cfg.mutation_rate();
    let mut ts: Vec<Transformation> =
        kinds.iter().enumerate().map(|(i, &kind)| Transformation::new(i, kind, net, share)).collect();

    let mut pops = Vec::with_capacity(s);
    for t in ts.iter_mut() {
        let mut rng = seeds::rng_for(cfg.base_seed, &[TAG_INIT, t.id as u64]);
        let mut pop = evo::init_population(net, cfg.k, n, &mut rng)?;
        pop.owner = t.id;
        let used = evaluate(&mut pop, t, net);
        t.consume(used)?;
        pops.push(pop);
    }

    let mut records = vec![GenerationRecord {
        generation: 0,
        evals: ts.iter().map(Transformation::consumed).collect(),
        best: pops.iter().map(|p| p.best_fitness().unwrap_or(f64::NAN)).collect(),
        r: estimate_relationship(&pops, cfg.k)?.upper(),
        transferred: vec![0; s],
    }];
    let mut transfers = Vec::new();

    for generation in 1.. {
        let active: Vec<bool> = ts.iter().map(|t| t.remaining() >= n).collect();
        if !active.iter().any(|&a| a) {
            break;
        }
        let rel = estimate_relationship(&pops, cfg.k)?;

        let mut offspring: Vec<Option<Population>> = vec![None; s];
        for_each_index(&mut offspring, |i, slot| {
            if active[i] {
                let mut rng = seeds::rng_for(cfg.base_seed, &[TAG_OFFSPRING, generation as u64, i as u64]);
                *slot = Some(evo::make_offspring(&pops[i], cfg.pc, pm, net, &mut rng)?);
            }
            Ok(())
        })?;
        let mut offspring: Vec<Population> = offspring
            .into_iter()
            .enumerate()
            .map(|(i, o)| o.unwrap_or_else(|| Population { members: Vec::new(), owner: i }))
            .collect();
        for i in 0..s {
            if active[i] {
                let used = evaluate(&mut offspring[i], &ts[i], net);
                ts[i].consume(used)?;
            }
        }

        let mut transferred = vec![0; s];
        if cfg.transfer_enabled && s > 1 {
            // stopped transformations donate from their last population
            let donors: Vec<Population> =
                (0..s).map(|j| if active[j] { offspring[j].clone() } else { pops[j].clone() }).collect();
            let caps: Vec<usize> = ts.iter().map(Transformation::remaining).collect();
            let mut rng = seeds::rng_for(cfg.base_seed, &[TAG_TRANSFER, generation as u64]);
            let events = transfer(&mut offspring, &donors, &rel, &active, &caps, generation, &mut rng);
            for e in &events {
                if e.fired {
                    let used = evaluate(&mut offspring[e.target], &ts[e.target], net);
                    ts[e.target].consume(used)?;
                    transferred[e.target] = e.replaced();
                }
            }
            transfers.extend(events);
        }

        for i in 0..s {
            if active[i] {
                pops[i] = evo::elitist_select(&pops[i], &offspring[i], n)?;
            }
        }
        records.push(GenerationRecord {
            generation,
            evals: ts.iter().map(Transformation::consumed).collect(),
            best: pops.iter().map(|p| p.best_fitness().unwrap_or(f64::NAN)).collect(),
            r: rel.upper(),
            transferred,
        });
    }

    let best = pops
        .iter()
        .map(|p| p.best().cloned().ok_or_else(|| Error::invalid("population without evaluated members")))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunOutcome {
        best,
        trace: RunTrace { transformations: kinds.to_vec(), records, transfers },
        transformations: ts,
        populations: pops,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SossOutcome {
    pub chosen: usize,
    /// `fitness[i][j]`: candidate `i` on transformation `j`.
    pub fitness: Vec<Vec<f64>>,
    /// `ranks[i][j]`: 1 = best on transformation `j`, ties averaged.
    pub ranks: Vec<Vec<f64>>,
    pub cumulative: Vec<f64>,
}

/// Cumulative-rank output selection: `CR_i = Σ_j C_j·rank_ij`, smallest wins,
/// lower index on ties.
pub fn soss_from_fitness(fitness: Vec<Vec<f64>>, prefs: &[f64]) -> Result<SossOutcome> {
    let s = prefs.len();
    validate_prefs(prefs, s)?;
    let c = fitness.len();
    if c == 0 || fitness.iter().any(|row| row.len() != s) {
        return Err(Error::invalid("fitness table must be candidates x transformations"));
    }
    let mut ranks = vec![vec![0.0; s]; c];
    for j in 0..s {
        let col: Vec<f64> = fitness.iter().map(|row| -row[j]).collect();
        for (i, r) in average_ranks(&col).into_iter().enumerate() {
            ranks[i][j] = r;
        }
    }
    let cumulative: Vec<f64> = ranks.iter().map(|row| row.iter().zip(prefs).map(|(r, w)| r * w).sum()).collect();
    let mut chosen = 0;
    for i in 1..c {
        if cumulative[i] < cumulative[chosen] - 1e-12 {
            chosen = i;
        }
    }
    Ok(SossOutcome { chosen, fitness, ranks, cumulative })
}

pub fn soss(
    candidates: &[Individual],
    transformations: &[Transformation],
    net: &Network,
    prefs: &[f64],
) -> Result<SossOutcome> {
    if prefs.len() != transformations.len() {
        return Err(Error::config("one preference per transformation is required"));
    }
    let fitness =
        candidates.iter().map(|cand| transformations.iter().map(|t| t.fitness(net, cand.genome())).collect()).collect();
    soss_from_fitness(fitness, prefs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McssOutcome {
    pub chosen: usize,
    pub estimates: Vec<SpreadEstimate>,
}

/// Monte Carlo output selection: highest mean spread, lower index on ties.
/// All candidates share the same replica streams.
pub fn mcss(candidates: &[Individual], net: &Network, cfg: &DiffusionConfig) -> Result<McssOutcome> {
    if candidates.is_empty() {
        return Err(Error::invalid("no candidates"));
    }
    let estimates = candidates.iter().map(|c| estimate_spread(net, c.genome(), cfg)).collect::<Result<Vec<_>>>()?;
    let mut chosen = 0;
    for (i, e) in estimates.iter().enumerate() {
        if e.mean > estimates[chosen].mean {
            chosen = i;
        }
    }
    Ok(McssOutcome { chosen, estimates })
}

/// A solver run followed by SOSS.
#[derive(Clone, Debug)]
pub struct Solution {
    pub seeds: Vec<u32>,
    pub soss: SossOutcome,
    pub outcome: RunOutcome,
}

pub fn solve(net: &Network, kinds: &[ProxyKind], cfg: &SolverConfig) -> Result<Solution> {
    let outcome = run(net, kinds, cfg)?;
    let prefs = cfg.preferences(kinds.len());
    let soss = soss(&outcome.best, &outcome.transformations, net, &prefs)?;
    let seeds = outcome.best[soss.chosen].seed_set();
    Ok(Solution { seeds, soss, outcome })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;

    fn pop(genomes: &[&[NodeId]], owner: usize) -> Population {
        Population { members: genomes.iter().map(|g| Individual::from_valid(g.to_vec())).collect(), owner }
    }

    fn net(n: usize) -> Network {
        let edges: Vec<(NodeId, NodeId)> = (0..n as NodeId - 1).map(|i| (i, i + 1)).collect();
        Network::from_edges(n, &edges, false, 0.1).unwrap()
    }

    #[test]
    fn worked_overlap_example() {
        // Pairwise overlaps (0,2,0, 2,1,3, 1,1,2).
        let p1 = pop(&[&[4, 5, 6], &[1, 2, 3], &[1, 3, 8]], 0);
        let p2 = pop(&[&[1, 2, 7], &[3, 4, 5], &[1, 2, 3]], 1);
        let r = estimate_relationship(&[p1, p2], 3).unwrap();
        assert!((r.get(0, 1) - 12.0 / 27.0).abs() < 1e-12);
        assert_eq!(r.get(0, 1), r.get(1, 0));
        assert_eq!(r.get(0, 0), 0.0);
    }

    #[test]
    fn overlap_extremes() {
        let same = pop(&[&[1, 2], &[2, 1]], 0);
        let r = estimate_relationship(&[same.clone(), same], 2).unwrap();
        assert!((r.get(0, 1) - 1.0).abs() < 1e-12);
        let a = pop(&[&[0, 1], &[1, 2]], 0);
        let b = pop(&[&[5, 6], &[7, 8]], 1);
        assert_eq!(estimate_relationship(&[a, b], 2).unwrap().get(0, 1), 0.0);
    }

    #[test]
    fn overlap_rejects_mismatch() {
        let a = pop(&[&[0, 1], &[1, 2]], 0);
        let b = pop(&[&[5, 6]], 1);
        assert!(estimate_relationship(&[a.clone(), b], 2).is_err());
        assert!(estimate_relationship(&[a], 3).is_err());
    }

    #[test]
    fn most_related_ties_pick_lowest() {
        let m = RelationshipMatrix::from_upper(3, &[0.2, 0.2, 0.5]).unwrap();
        assert_eq!(m.most_related(0), Some((1, 0.2)));
        assert_eq!(m.most_related(2), Some((1, 0.5)));
        assert_eq!(RelationshipMatrix::zeros(1).most_related(0), None);
    }

    fn evaluated(n: usize, base: NodeId, owner: usize) -> Population {
        let members = (0..n)
            .map(|i| {
                let mut m = Individual::from_valid(vec![base + i as NodeId]);
                m.set_fitness(i as f64);
                m
            })
            .collect();
        Population { members, owner }
    }

    #[test]
    fn transfer_copies_top_donors() {
        let off = vec![evaluated(100, 0, 0), evaluated(100, 100, 1)];
        let donors = off.clone();
        let r = RelationshipMatrix::from_upper(2, &[0.44]).unwrap();
        let mut fired = 0;
        for s in 0..20 {
            let mut o = off.clone();
            let ev = transfer(&mut o, &donors, &r, &[true, true], &[usize::MAX; 2], 1, &mut seeds::stream(s, 0));
            for e in ev.iter().filter(|e| e.fired) {
                fired += 1;
                assert_eq!(e.replaced(), 44);
                assert!(e.draw < 0.44);
                let imported: Vec<NodeId> = e.positions.iter().map(|&p| o[e.target].members[p].genome()[0]).collect();
                let donor_base = if e.source == 1 { 100 } else { 0 };
                let mut expect: Vec<NodeId> = (56..100).map(|v| v + donor_base).collect();
                let mut got = imported.clone();
                got.sort();
                expect.sort();
                assert_eq!(got, expect);
                assert!(e.positions.iter().all(|&p| o[e.target].members[p].fitness().is_none()));
            }
        }
        assert!(fired > 0);
    }

    #[test]
    fn zero_relationship_never_transfers() {
        let mut off = vec![evaluated(10, 0, 0), evaluated(10, 10, 1)];
        let donors = off.clone();
        let r = RelationshipMatrix::zeros(2);
        for s in 0..50 {
            let ev = transfer(&mut off, &donors, &r, &[true, true], &[usize::MAX; 2], 1, &mut seeds::stream(s, 0));
            assert!(ev.iter().all(|e| !e.fired));
        }
    }

    #[test]
    fn transfer_count_is_floor() {
        assert_eq!(transfer_count(100, 0.44), 44);
        assert_eq!(transfer_count(100, 29.0 / 100.0), 29);
        assert_eq!(transfer_count(3, 12.0 / 27.0), 1);
        assert_eq!(transfer_count(100, 0.009), 0);
    }

    #[test]
    fn soss_examples() {
        // ranks [[1,2],[2,1]] with equal weights tie; index 0 wins
        let out = soss_from_fitness(vec![vec![2.0, 1.0], vec![1.0, 2.0]], &[0.5, 0.5]).unwrap();
        assert_eq!(out.ranks, vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert_eq!(out.cumulative, vec![1.5, 1.5]);
        assert_eq!(out.chosen, 0);

        let out = soss_from_fitness(vec![vec![3.0]], &[1.0]).unwrap();
        assert_eq!(out.chosen, 0);

        for c in [[0.1, 0.9], [0.5, 0.5], [0.9, 0.1]] {
            let out = soss_from_fitness(vec![vec![1.0, 1.0], vec![5.0, 5.0], vec![2.0, 0.5]], &c).unwrap();
            assert_eq!(out.chosen, 1);
        }
        assert!(soss_from_fitness(vec![vec![1.0, 2.0]], &[0.6, 0.6]).is_err());
        assert!(soss_from_fitness(vec![vec![1.0, 2.0]], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn soss_tied_fitness_gets_average_rank() {
        let out = soss_from_fitness(vec![vec![1.0], vec![1.0], vec![0.0]], &[1.0]).unwrap();
        assert_eq!(out.ranks, vec![vec![1.5], vec![1.5], vec![3.0]]);
    }

    #[test]
    fn mcss_ties_on_zero_probability() {
        let g = net(6).with_uniform_p(0.0).unwrap();
        let c = vec![Individual::from_valid(vec![0, 1]), Individual::from_valid(vec![3, 4])];
        let out = mcss(&c, &g, &DiffusionConfig { replicas: 100, base_seed: 1 }).unwrap();
        assert_eq!(out.chosen, 0);
        assert!(out.estimates.iter().all(|e| e.mean == 2.0));
    }

    #[test]
    fn config_validation() {
        let g = net(10);
        let mut cfg = SolverConfig::new(3);
        assert!(cfg.validate(2, &g).is_ok());
        cfg.k = 11;
        assert!(cfg.validate(2, &g).is_err());
        cfg.k = 3;
        cfg.max_evaluations = Some(150);
        assert!(cfg.validate(2, &g).is_err());
        cfg.max_evaluations = None;
        cfg.prefs = Some(vec![0.3, 0.3]);
        assert!(cfg.validate(2, &g).is_err());
        assert!(cfg.validate(0, &g).is_err());
    }

    #[test]
    fn small_run_respects_budget_and_elitism() {
        let g = net(40);
        let mut cfg = SolverConfig::new(4);
        cfg.population_size = 10;
        cfg.max_evaluations = Some(400);
        cfg.base_seed = 3;
        let out = run(&g, &[ProxyKind::Edv, ProxyKind::Tis], &cfg).unwrap();
        for t in &out.transformations {
            assert!(t.consumed() <= 200);
        }
        for i in 0..2 {
            let series: Vec<f64> = out.trace.records.iter().map(|r| r.best[i]).collect();
            assert!(series.windows(2).all(|w| w[1] >= w[0]));
        }
        let mut csv = Vec::new();
        out.trace.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text
            .starts_with("generation,evals_edv,evals_tis,best_edv,best_tis,r_edv_tis,transferred_edv,transferred_tis"));
    }
}
