//! Initial k-way partitioning of the coarsest hypergraph.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, NodeId, Weight};
use crate::partition::{
    ideal_part_weight, is_feasible, max_part_weight, Objective, PartId, PartitionAssignment,
};
use crate::refinement::{fm_refine, FmConfig};
use crate::seed::{derive_seed, rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialStrategy {
    Random,
    GreedyGrowth,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialConfig {
    /// Total attempts; strategies are used round-robin.
    pub attempts: usize,
    pub strategies: Vec<InitialStrategy>,
    /// Run FM on every feasible candidate before comparing them.
    pub refine: bool,
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig {
            attempts: 10,
            strategies: vec![InitialStrategy::Random, InitialStrategy::GreedyGrowth],
            refine: true,
        }
    }
}

fn lightest(part_weight: &[Weight]) -> PartId {
    (0..part_weight.len())
        .min_by_key(|&p| (part_weight[p], p))
        .expect("k >= 1")
}

fn unassigned_labels(h: &Hypergraph, labels: Vec<Option<PartId>>, k: usize) -> PartitionAssignment {
    let labels = labels
        .into_iter()
        .map(|l| l.expect("every node placed"))
        .collect();
    PartitionAssignment::new(h, labels, k).expect("labels are in range")
}

/// Shuffled first-fit: each node goes to the currently lightest part. The
/// result may violate the balance bound when a node fits nowhere; use
/// [`is_feasible`] to check.
pub fn random_balanced(h: &Hypergraph, k: usize, seed: u64) -> PartitionAssignment {
    let mut order: Vec<NodeId> = (0..h.num_nodes()).collect();
    order.shuffle(&mut rng(seed));
    let mut part_weight = vec![0; k];
    let mut labels = vec![None; h.num_nodes()];
    for v in order {
        let p = lightest(&part_weight);
        part_weight[p] += h.node_weight(v);
        labels[v] = Some(p);
    }
    unassigned_labels(h, labels, k)
}

/// Hop distances from `sources` over shared edges; `usize::MAX` when unreachable.
fn bfs_distances(h: &Hypergraph, sources: &[NodeId]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; h.num_nodes()];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for &e in h.incident_edges(v) {
            for &u in h.pins(e) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
    }
    dist
}

/// Region growing from `k` spread-out seeds.
///
/// The first seed is a node of maximum distance from a random start within
/// its component; each further seed is a node farthest from all previous
/// seeds (unreachable counts as farthest, ties broken randomly).
/// The lightest part still below `⌈W/k⌉` repeatedly absorbs the frontier
/// node with the smallest connectivity increase, preferring stronger
/// attachment and then smaller ids. Nodes left over are placed first-fit
/// into the lightest part.
pub fn greedy_growth(h: &Hypergraph, k: usize, alpha: f64, seed: u64) -> PartitionAssignment {
    let n = h.num_nodes();
    let mut rng = rng(seed);
    let mut labels: Vec<Option<PartId>> = vec![None; n];
    let mut part_weight: Vec<Weight> = vec![0; k];
    let total = h.total_node_weight();
    let target = ideal_part_weight(total, k);
    let limit = max_part_weight(total, k, alpha);

    // pins_in[e * k + p]
    let mut pins_in = vec![0u32; h.num_edges() * k];
    let assign = |v: NodeId,
                  p: PartId,
                  labels: &mut Vec<Option<PartId>>,
                  pw: &mut Vec<Weight>,
                  pins_in: &mut Vec<u32>| {
        labels[v] = Some(p);
        pw[p] += h.node_weight(v);
        for &e in h.incident_edges(v) {
            pins_in[e * k + p] += 1;
        }
    };

    let mut seeds: Vec<NodeId> = Vec::with_capacity(k);
    if n > 0 {
        // Start from a node far from a random one, then keep adding the
        // node farthest from all seeds so far.
        let start = rng.gen_range(0..n);
        let dist = bfs_distances(h, &[start]);
        let far = dist
            .iter()
            .copied()
            .filter(|&d| d != usize::MAX)
            .max()
            .expect("start reaches itself");
        let candidates: Vec<NodeId> = (0..n).filter(|&v| dist[v] == far).collect();
        seeds.push(*candidates.choose(&mut rng).expect("non-empty"));
        while seeds.len() < k.min(n) {
            let dist = bfs_distances(h, &seeds);
            let far = (0..n)
                .filter(|v| !seeds.contains(v))
                .map(|v| dist[v])
                .max()
                .expect("unseeded node exists");
            let candidates: Vec<NodeId> = (0..n)
                .filter(|v| !seeds.contains(v) && dist[*v] == far)
                .collect();
            seeds.push(*candidates.choose(&mut rng).expect("non-empty"));
        }
    }
    for (p, &s) in seeds.iter().enumerate() {
        assign(s, p, &mut labels, &mut part_weight, &mut pins_in);
    }

    let mut active = vec![true; k];
    loop {
        let Some(p) = (0..k)
            .filter(|&p| active[p] && part_weight[p] < target)
            .min_by_key(|&p| (part_weight[p], p))
        else {
            break;
        };
        // Frontier: unassigned nodes sharing an edge with part p.
        let mut best: Option<(Weight, Weight, NodeId)> = None;
        let mut seen = vec![false; n];
        for v in 0..n {
            if labels[v] != Some(p) {
                continue;
            }
            for &e in h.incident_edges(v) {
                for &u in h.pins(e) {
                    if labels[u].is_some() || seen[u] || part_weight[p] + h.node_weight(u) > limit {
                        continue;
                    }
                    seen[u] = true;
                    let mut increase = 0;
                    let mut attach = 0;
                    for &f in h.incident_edges(u) {
                        let row = &pins_in[f * k..(f + 1) * k];
                        let placed: u32 = row.iter().sum();
                        if row[p] > 0 {
                            attach += h.edge_weight(f);
                        } else if placed > 0 {
                            increase += h.edge_weight(f);
                        }
                    }
                    let key = (increase, -attach, u);
                    if best.is_none_or(|b| key < b) {
                        best = Some(key);
                    }
                }
            }
        }
        match best {
            Some((_, _, u)) => assign(u, p, &mut labels, &mut part_weight, &mut pins_in),
            None => active[p] = false,
        }
    }

    for v in 0..n {
        if labels[v].is_none() {
            let p = lightest(&part_weight);
            assign(v, p, &mut labels, &mut part_weight, &mut pins_in);
        }
    }
    unassigned_labels(h, labels, k)
}

/// Runs the configured portfolio and keeps the feasible attempt with the
/// smallest objective (earliest attempt on ties).
///
/// When no attempt is feasible the error carries the attempt with the
/// smallest maximum part weight.
pub fn best_initial(
    h: &Hypergraph,
    k: usize,
    alpha: f64,
    objective: Objective,
    cfg: &InitialConfig,
    seed: u64,
) -> Result<PartitionAssignment> {
    if k < 2 {
        return Err(Error::Config("k must be at least 2".into()));
    }
    if cfg.attempts == 0 || cfg.strategies.is_empty() {
        return Err(Error::Config(
            "initial partitioning needs at least one attempt".into(),
        ));
    }
    let candidates = (0..cfg.attempts).map(|i| {
        let s = derive_seed(seed, i as u64);
        let mut p = match cfg.strategies[i % cfg.strategies.len()] {
            InitialStrategy::Random => random_balanced(h, k, s),
            InitialStrategy::GreedyGrowth => greedy_growth(h, k, alpha, s),
        };
        if cfg.refine && is_feasible(h, &p, alpha) {
            fm_refine(h, &mut p, alpha, objective, &FmConfig::default());
        }
        p
    });
    select_best(h, alpha, objective, candidates)
}

/// Feasibility first, then objective, then order.
pub fn select_best(
    h: &Hypergraph,
    alpha: f64,
    objective: Objective,
    candidates: impl IntoIterator<Item = PartitionAssignment>,
) -> Result<PartitionAssignment> {
    let mut best: Option<(Weight, PartitionAssignment)> = None;
    let mut least_imbalanced: Option<PartitionAssignment> = None;
    let mut attempts = 0;
    for p in candidates {
        attempts += 1;
        if is_feasible(h, &p, alpha) {
            let obj = objective.evaluate(h, &p);
            if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                best = Some((obj, p));
            }
        } else if least_imbalanced
            .as_ref()
            .is_none_or(|q| p.max_part_weight() < q.max_part_weight())
        {
            least_imbalanced = Some(p);
        }
    }
    match (best, least_imbalanced) {
        (Some((_, p)), _) => Ok(p),
        (None, Some(p)) => Err(Error::Infeasible {
            attempts,
            least_imbalanced: Box::new(p),
        }),
        (None, None) => Err(Error::Config("no initial partition candidates".into())),
    }
}
