//! Seed-set genomes and the genetic operators that act on them.

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::Serialize;

use crate::diffusion::validate_seeds;
use crate::error::{Error, Result};
use crate::graph::{Network, NodeId};

/// An ordered genome of `k` distinct node ids. Position matters for crossover;
/// the represented seed set does not depend on order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Individual {
    genome: Vec<NodeId>,
    fitness: Option<f64>,
}

impl Individual {
    pub fn new(net: &Network, genome: Vec<NodeId>) -> Result<Self> {
        validate_seeds(net, &genome)?;
        Ok(Individual { genome, fitness: None })
    }

    pub(crate) fn from_valid(genome: Vec<NodeId>) -> Self {
        Individual { genome, fitness: None }
    }

    pub fn genome(&self) -> &[NodeId] {
        &self.genome
    }

    pub fn into_genome(self) -> Vec<NodeId> {
        self.genome
    }

    pub fn len(&self) -> usize {
        self.genome.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genome.is_empty()
    }

    pub fn fitness(&self) -> Option<f64> {
        self.fitness
    }

    pub fn set_fitness(&mut self, f: f64) {
        self.fitness = Some(f);
    }

    pub fn clear_fitness(&mut self) {
        self.fitness = None;
    }

    fn set_gene(&mut self, pos: usize, v: NodeId) {
        self.genome[pos] = v;
        self.fitness = None;
    }

    /// The seed set in ascending order.
    pub fn seed_set(&self) -> Vec<NodeId> {
        let mut s = self.genome.clone();
        s.sort_unstable();
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Population {
    pub members: Vec<Individual>,
    /// Index of the transformation this population is evaluated on.
    pub owner: usize,
}

impl Population {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Highest-fitness member (first one on ties). Unevaluated members are skipped.
    pub fn best(&self) -> Option<&Individual> {
        self.members.iter().filter(|m| m.fitness.is_some()).fold(None, |best: Option<&Individual>, m| match best {
            Some(b) if b.fitness >= m.fitness => Some(b),
            _ => Some(m),
        })
    }

    pub fn best_fitness(&self) -> Option<f64> {
        self.best().and_then(Individual::fitness)
    }
}

/// Draws a node uniformly from `V ∖ present`, or `None` if every node is present.
fn sample_absent<R: Rng + ?Sized>(n: usize, present: &[NodeId], rng: &mut R) -> Option<NodeId> {
    let mut distinct = present.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() >= n {
        return None;
    }
    if n >= 4 * distinct.len() {
        loop {
            let v = rng.gen_range(0..n) as NodeId;
            if distinct.binary_search(&v).is_err() {
                return Some(v);
            }
        }
    }
    let free: Vec<NodeId> = (0..n as NodeId).filter(|v| distinct.binary_search(v).is_err()).collect();
    free.choose(rng).copied()
}

/// The `k` highest-degree nodes, ties broken by ascending id.
pub fn top_k_by_degree(net: &Network, k: usize) -> Vec<NodeId> {
    let mut ids: Vec<NodeId> = (0..net.node_count() as NodeId).collect();
    ids.sort_by_key(|&v| (std::cmp::Reverse(net.deg(v)), v));
    ids.truncate(k);
    ids
}

pub const WARM_START_REPLACE_PROB: f64 = 0.5;

/// Degree warm start: every individual starts from the top-`k` degree set and
/// each gene is swapped for a random non-member neighbour with probability 1/2.
pub fn init_population<R: Rng + ?Sized>(net: &Network, k: usize, n: usize, rng: &mut R) -> Result<Population> {
    init_population_with(net, k, n, WARM_START_REPLACE_PROB, rng)
}

pub fn init_population_with<R: Rng + ?Sized>(
    net: &Network,
    k: usize,
    n: usize,
    replace_prob: f64,
    rng: &mut R,
) -> Result<Population> {
    if k > net.node_count() {
        return Err(Error::invalid(format!("k = {k} exceeds the {} nodes", net.node_count())));
    }
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if n < 2 {
        return Err(Error::invalid("population size must be at least 2"));
    }
    let base = top_k_by_degree(net, k);
    let mut members = Vec::with_capacity(n);
    for _ in 0..n {
        let mut genome = base.clone();
        for pos in 0..k {
            if rng.gen::<f64>() >= replace_prob {
                continue;
            }
            let gene = base[pos];
            let eligible: Vec<NodeId> = net.adj(gene).iter().copied().filter(|v| !genome.contains(v)).collect();
            if let Some(&v) = eligible.choose(rng) {
                genome[pos] = v;
            }
        }
        members.push(Individual::from_valid(genome));
    }
    Ok(Population { members, owner: 0 })
}

/// Swaps the 1-based inclusive segment `[x1, x2]` between two genomes.
pub fn swap_segment(p1: &[NodeId], p2: &[NodeId], x1: usize, x2: usize) -> (Vec<NodeId>, Vec<NodeId>) {
    let (mut c1, mut c2) = (p1.to_vec(), p2.to_vec());
    c1[x1 - 1..x2].copy_from_slice(&p2[x1 - 1..x2]);
    c2[x1 - 1..x2].copy_from_slice(&p1[x1 - 1..x2]);
    (c1, c2)
}

/// Two-point crossover with probability `pc`; cut points satisfy `1 <= x1 < x2 <= k`.
pub fn two_point_crossover<R: Rng + ?Sized>(
    p1: &Individual,
    p2: &Individual,
    pc: f64,
    net: &Network,
    rng: &mut R,
) -> Result<(Individual, Individual)> {
    let k = p1.len();
    if p2.len() != k {
        return Err(Error::invalid("parents differ in length"));
    }
    if k < 2 || rng.gen::<f64>() >= pc {
        return Ok((p1.clone(), p2.clone()));
    }
    let mut cuts = index::sample(rng, k, 2).into_vec();
    cuts.sort_unstable();
    let (c1, c2) = swap_segment(&p1.genome, &p2.genome, cuts[0] + 1, cuts[1] + 1);
    Ok((repair(c1, net, rng)?, repair(c2, net, rng)?))
}

/// Replaces each gene with probability `pm` by a random node outside the individual.
pub fn mutate<R: Rng + ?Sized>(ind: &Individual, pm: f64, net: &Network, rng: &mut R) -> Individual {
    let mut out = ind.clone();
    for pos in 0..out.len() {
        if rng.gen::<f64>() < pm {
            if let Some(v) = sample_absent(net.node_count(), &out.genome, rng) {
                out.set_gene(pos, v);
            }
        }
    }
    out
}

/// Keeps the first occurrence of every id and replaces later duplicates with
/// random ids not already in the genome.
pub fn repair<R: Rng + ?Sized>(mut genome: Vec<NodeId>, net: &Network, rng: &mut R) -> Result<Individual> {
    let n = net.node_count();
    if genome.len() > n {
        return Err(Error::invalid(format!("{} genes cannot be distinct among {n} nodes", genome.len())));
    }
    if let Some(&bad) = genome.iter().find(|&&v| v as usize >= n) {
        return Err(Error::NodeOutOfRange { id: bad as usize, nodes: n });
    }
    let mut dup_positions = Vec::new();
    let mut kept: Vec<NodeId> = Vec::with_capacity(genome.len());
    for (pos, &v) in genome.iter().enumerate() {
        if kept.contains(&v) {
            dup_positions.push(pos);
        } else {
            kept.push(v);
        }
    }
    for pos in dup_positions {
        let v = sample_absent(n, &kept, rng).expect("k <= |V| leaves a free node");
        genome[pos] = v;
        kept.push(v);
    }
    Ok(Individual::from_valid(genome))
}

/// Random pairing, crossover, then mutation; yields `parents.len()` unevaluated children.
pub fn make_offspring<R: Rng + ?Sized>(
    parents: &Population,
    pc: f64,
    pm: f64,
    net: &Network,
    rng: &mut R,
) -> Result<Population> {
    let n = parents.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    if n % 2 == 1 {
        order.push(rng.gen_range(0..n));
    }
    let mut members = Vec::with_capacity(n + 1);
    for pair in order.chunks(2) {
        let (a, b) = two_point_crossover(&parents.members[pair[0]], &parents.members[pair[1]], pc, net, rng)?;
        members.push(a);
        members.push(b);
    }
    members.truncate(n);
    let members = members
        .iter()
        .map(|c| {
            let mut m = mutate(c, pm, net, rng);
            m.clear_fitness();
            m
        })
        .collect();
    Ok(Population { members, owner: parents.owner })
}

/// The `n` fittest of parents followed by offspring. Ties keep parents first,
/// then lower member index.
pub fn elitist_select(parents: &Population, offspring: &Population, n: usize) -> Result<Population> {
    let mut pool: Vec<(f64, &Individual)> = Vec::with_capacity(parents.len() + offspring.len());
    for m in parents.members.iter().chain(&offspring.members) {
        let f = m.fitness.ok_or_else(|| Error::invalid("candidate without fitness in selection"))?;
        pool.push((f, m));
    }
    pool.sort_by(|a, b| b.0.total_cmp(&a.0));
    let members = pool.into_iter().take(n).map(|(_, m)| m.clone()).collect();
    Ok(Population { members, owner: parents.owner })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;

    fn complete(n: usize) -> Network {
        let mut e = Vec::new();
        for u in 0..n as NodeId {
            for v in u + 1..n as NodeId {
                e.push((u, v));
            }
        }
        Network::from_edges(n, &e, false, 0.1).unwrap()
    }

    fn star() -> Network {
        Network::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], false, 0.1).unwrap()
    }

    fn valid(ind: &Individual, n: usize) -> bool {
        let mut s = ind.seed_set();
        s.dedup();
        s.len() == ind.len() && s.iter().all(|&v| (v as usize) < n)
    }

    fn with_fitness(genomes: &[f64], base: NodeId) -> Population {
        let members = genomes
            .iter()
            .enumerate()
            .map(|(i, &f)| {
                let mut m = Individual::from_valid(vec![base + i as NodeId]);
                m.set_fitness(f);
                m
            })
            .collect();
        Population { members, owner: 0 }
    }

    #[test]
    fn warm_start_without_replacement_is_top_degree() {
        let net = Network::from_edges(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (3, 5), (4, 5)], false, 0.1).unwrap();
        let pop = init_population_with(&net, 2, 4, 0.0, &mut seeds::stream(0, 0)).unwrap();
        for m in &pop.members {
            assert_eq!(m.genome(), &[1, 3]);
        }
    }

    #[test]
    fn warm_start_on_star() {
        let net = star();
        let pop = init_population(&net, 1, 50, &mut seeds::stream(2, 0)).unwrap();
        assert!(pop.members.iter().all(|m| m.len() == 1));
        assert!(pop.members.iter().any(|m| m.genome() == [0]));
        assert!(pop.members.iter().any(|m| m.genome() != [0]));
    }

    #[test]
    fn warm_start_errors() {
        let net = star();
        let mut rng = seeds::stream(0, 0);
        assert!(init_population(&net, 6, 10, &mut rng).is_err());
        assert!(init_population(&net, 2, 1, &mut rng).is_err());
    }

    #[test]
    fn segment_swap_example() {
        let (a, b) = swap_segment(&[1, 2, 3, 4, 5], &[6, 7, 8, 9, 10], 2, 4);
        assert_eq!(a, vec![1, 7, 8, 9, 5]);
        assert_eq!(b, vec![6, 2, 3, 4, 10]);
    }

    #[test]
    fn crossover_repair_keeps_prefix() {
        let net = complete(10);
        let (raw, _) = swap_segment(&[1, 2, 3], &[3, 1, 4], 1, 2);
        assert_eq!(raw, vec![3, 1, 3]);
        for s in 0..50 {
            let fixed = repair(raw.clone(), &net, &mut seeds::stream(s, 0)).unwrap();
            assert_eq!(&fixed.genome()[..2], &[3, 1]);
            assert!(valid(&fixed, 10));
        }
    }

    #[test]
    fn crossover_of_identical_parents() {
        let net = complete(10);
        let p = Individual::new(&net, vec![4, 5, 6, 7]).unwrap();
        for s in 0..20 {
            let (a, b) = two_point_crossover(&p, &p, 1.0, &net, &mut seeds::stream(s, 0)).unwrap();
            assert_eq!(a.genome(), p.genome());
            assert_eq!(b.genome(), p.genome());
        }
    }

    #[test]
    fn crossover_short_genome_is_identity() {
        let net = complete(4);
        let a = Individual::new(&net, vec![1]).unwrap();
        let b = Individual::new(&net, vec![2]).unwrap();
        let (c, d) = two_point_crossover(&a, &b, 1.0, &net, &mut seeds::stream(0, 0)).unwrap();
        assert_eq!((c.genome(), d.genome()), (a.genome(), b.genome()));
    }

    #[test]
    fn mutation_edge_cases() {
        let net = complete(3);
        let ind = Individual::new(&net, vec![0, 1, 2]).unwrap();
        let mut rng = seeds::stream(0, 0);
        assert_eq!(mutate(&ind, 0.0, &net, &mut rng), ind);
        assert_eq!(mutate(&ind, 1.0, &net, &mut rng).genome(), ind.genome());

        // |V| = k + 1: every step swaps in whichever id is absent at that moment.
        let net4 = complete(4);
        let ind = Individual::new(&net4, vec![0, 1, 2]).unwrap();
        let out = mutate(&ind, 1.0, &net4, &mut rng);
        assert_eq!(out.genome(), &[3, 0, 1]);
    }

    #[test]
    fn repair_examples() {
        let net3 = complete(3);
        let mut rng = seeds::stream(4, 0);
        let ok = repair(vec![2, 0, 1], &net3, &mut rng).unwrap();
        assert_eq!(ok.genome(), &[2, 0, 1]);
        let fixed = repair(vec![1, 1, 1], &net3, &mut rng).unwrap();
        assert_eq!(fixed.genome()[0], 1);
        assert_eq!(fixed.seed_set(), vec![0, 1, 2]);
        let net2 = complete(2);
        assert_eq!(repair(vec![1, 1], &net2, &mut rng).unwrap().genome(), &[1, 0]);
        assert!(repair(vec![0, 0, 0], &net2, &mut rng).is_err());
    }

    #[test]
    fn elitism_examples() {
        let parents = with_fitness(&[5.0, 3.0, 9.0, 1.0], 0);
        let offspring = with_fitness(&[4.0, 8.0, 2.0, 6.0], 10);
        let next = elitist_select(&parents, &offspring, 4).unwrap();
        let f: Vec<f64> = next.members.iter().map(|m| m.fitness().unwrap()).collect();
        assert_eq!(f, vec![9.0, 8.0, 6.0, 5.0]);

        let worse = with_fitness(&[0.0, 0.0, 0.0, 0.0], 10);
        assert_eq!(
            elitist_select(&parents, &worse, 4).unwrap().members.iter().map(|m| m.genome()[0]).collect::<Vec<_>>(),
            vec![2, 0, 1, 3]
        );
        let better = with_fitness(&[10.0, 11.0, 12.0, 13.0], 10);
        let next = elitist_select(&parents, &better, 4).unwrap();
        assert!(next.members.iter().all(|m| m.genome()[0] >= 10));
    }

    #[test]
    fn elitism_ties_prefer_parents() {
        let parents = with_fitness(&[1.0, 1.0], 0);
        let offspring = with_fitness(&[1.0, 1.0], 10);
        let next = elitist_select(&parents, &offspring, 2).unwrap();
        assert_eq!(next.members[0].genome(), &[0]);
        assert_eq!(next.members[1].genome(), &[1]);
    }

    #[test]
    fn elitism_requires_fitness() {
        let parents = with_fitness(&[1.0], 0);
        let mut offspring = with_fitness(&[1.0], 5);
        offspring.members[0].clear_fitness();
        assert!(elitist_select(&parents, &offspring, 1).is_err());
    }

    #[test]
    fn zero_rates_are_identity() {
        let net = complete(12);
        let pop = init_population(&net, 4, 10, &mut seeds::stream(1, 0)).unwrap();
        let off = make_offspring(&pop, 0.0, 0.0, &net, &mut seeds::stream(1, 1)).unwrap();
        let mut a: Vec<_> = pop.members.iter().map(|m| m.genome().to_vec()).collect();
        let mut b: Vec<_> = off.members.iter().map(|m| m.genome().to_vec()).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}
