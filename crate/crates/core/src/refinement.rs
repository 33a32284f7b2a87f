//! Projection and Fiduccia-Mattheyses style k-way refinement.

use std::collections::BTreeSet;

use crate::hypergraph::{ContractionMap, EdgeId, Hypergraph, NodeId, Weight};
use crate::partition::{max_part_weight, Objective, PartId, PartitionAssignment};

/// Gives every fine node the label of its coarse node.
pub fn project(
    coarse: &PartitionAssignment,
    map: &ContractionMap,
    fine: &Hypergraph,
) -> PartitionAssignment {
    let labels = (0..map.fine_count())
        .map(|v| coarse.label(map.coarse(v)))
        .collect();
    PartitionAssignment::new(fine, labels, coarse.k()).expect("labels come from a valid assignment")
}

/// `Φ(e, p)`: number of pins of `e` in part `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinCounts {
    k: usize,
    counts: Vec<u32>,
}

impl PinCounts {
    pub fn new(h: &Hypergraph, p: &PartitionAssignment) -> Self {
        let k = p.k();
        let mut counts = vec![0; h.num_edges() * k];
        for e in 0..h.num_edges() {
            for &v in h.pins(e) {
                counts[e * k + p.label(v)] += 1;
            }
        }
        PinCounts { k, counts }
    }

    pub fn get(&self, e: EdgeId, part: PartId) -> u32 {
        self.counts[e * self.k + part]
    }

    fn shift(&mut self, h: &Hypergraph, v: NodeId, from: PartId, to: PartId) {
        for &e in h.incident_edges(v) {
            self.counts[e * self.k + from] -= 1;
            self.counts[e * self.k + to] += 1;
        }
    }
}

/// Objective change contributed by edge `e` when one of its pins moves from
/// `from` to `to`, given the counts before the move.
fn edge_delta(
    h: &Hypergraph,
    phi: &PinCounts,
    e: EdgeId,
    from: PartId,
    to: PartId,
    objective: Objective,
) -> Weight {
    let w = h.edge_weight(e);
    let (in_from, in_to) = (phi.get(e, from), phi.get(e, to));
    match objective {
        Objective::Connectivity => w * ((in_to == 0) as Weight - (in_from == 1) as Weight),
        Objective::Cut => {
            let size = h.edge_size(e) as u32;
            if in_from == size {
                w
            } else if in_from == 1 && in_to == size - 1 {
                -w
            } else {
                0
            }
        }
    }
}

/// `objective(after) − objective(before)` for moving `v` to `to`.
/// Negative values are improvements.
pub fn move_gain(
    h: &Hypergraph,
    p: &PartitionAssignment,
    v: NodeId,
    to: PartId,
    objective: Objective,
) -> Weight {
    let from = p.label(v);
    if from == to {
        return 0;
    }
    let mut delta = 0;
    for &e in h.incident_edges(v) {
        let (mut in_from, mut in_to) = (0u32, 0u32);
        for &u in h.pins(e) {
            let l = p.label(u);
            in_from += (l == from) as u32;
            in_to += (l == to) as u32;
        }
        let w = h.edge_weight(e);
        delta += match objective {
            Objective::Connectivity => w * ((in_to == 0) as Weight - (in_from == 1) as Weight),
            Objective::Cut => {
                let size = h.edge_size(e) as u32;
                if in_from == size {
                    w
                } else if in_from == 1 && in_to == size - 1 {
                    -w
                } else {
                    0
                }
            }
        };
    }
    delta
}

/// Move deltas for every node and target part; the entry for a node's own
/// part is always 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GainTable {
    k: usize,
    delta: Vec<Weight>,
}

impl GainTable {
    pub fn new(h: &Hypergraph, p: &PartitionAssignment, objective: Objective) -> Self {
        let phi = PinCounts::new(h, p);
        let mut t = GainTable {
            k: p.k(),
            delta: vec![0; h.num_nodes() * p.k()],
        };
        for v in 0..h.num_nodes() {
            t.refresh(h, p, &phi, v, objective);
        }
        t
    }

    pub fn delta(&self, v: NodeId, to: PartId) -> Weight {
        self.delta[v * self.k + to]
    }

    fn row(&self, v: NodeId) -> &[Weight] {
        &self.delta[v * self.k..(v + 1) * self.k]
    }

    fn refresh(
        &mut self,
        h: &Hypergraph,
        p: &PartitionAssignment,
        phi: &PinCounts,
        v: NodeId,
        objective: Objective,
    ) {
        let from = p.label(v);
        let k = self.k;
        let row = &mut self.delta[v * k..(v + 1) * k];
        row.iter_mut().for_each(|d| *d = 0);
        for &e in h.incident_edges(v) {
            for (to, slot) in row.iter_mut().enumerate() {
                if to != from {
                    *slot += edge_delta(h, phi, e, from, to, objective);
                }
            }
        }
    }

    fn best(&self, v: NodeId, from: PartId) -> Weight {
        self.row(v)
            .iter()
            .enumerate()
            .filter(|&(to, _)| to != from)
            .map(|(_, &d)| d)
            .min()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FmConfig {
    pub max_passes: usize,
    /// A pass ends after this many consecutive moves without a new best.
    pub stall_limit: usize,
}

impl Default for FmConfig {
    fn default() -> Self {
        FmConfig {
            max_passes: 8,
            stall_limit: 350,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FmStats {
    pub initial_objective: Weight,
    pub final_objective: Weight,
    pub passes: usize,
    /// Moves kept after rollback, summed over passes.
    pub moves: usize,
}

fn is_boundary(h: &Hypergraph, phi: &PinCounts, p: &PartitionAssignment, v: NodeId) -> bool {
    let own = p.label(v);
    h.incident_edges(v)
        .iter()
        .any(|&e| phi.get(e, own) < h.edge_size(e) as u32)
}

/// Pass-based local search. Each pass repeatedly applies the best move that
/// keeps every part within `(1+α)·⌈W/k⌉` and nonempty, locking moved nodes, and then
/// rolls back to the best prefix. Stops after a pass without improvement or
/// after `max_passes`.
pub fn fm_refine(
    h: &Hypergraph,
    p: &mut PartitionAssignment,
    alpha: f64,
    objective: Objective,
    cfg: &FmConfig,
) -> FmStats {
    fm_refine_observed(h, p, alpha, objective, cfg, |_, _| {})
}

/// Like [`fm_refine`], calling `observe(pass, assignment)` at the start of
/// every pass and after every tentative move, before rollback.
pub fn fm_refine_observed(
    h: &Hypergraph,
    p: &mut PartitionAssignment,
    alpha: f64,
    objective: Objective,
    cfg: &FmConfig,
    mut observe: impl FnMut(usize, &PartitionAssignment),
) -> FmStats {
    let initial = objective.evaluate(h, p);
    let mut stats = FmStats {
        initial_objective: initial,
        final_objective: initial,
        passes: 0,
        moves: 0,
    };
    if p.k() < 2 || h.num_edges() == 0 {
        return stats;
    }
    let limit = max_part_weight(h.total_node_weight(), p.k(), alpha);
    for pass in 0..cfg.max_passes {
        stats.passes += 1;
        let mut at_pass = |q: &PartitionAssignment| observe(pass, q);
        let (improvement, kept) = fm_pass(h, p, limit, objective, cfg.stall_limit, &mut at_pass);
        stats.moves += kept;
        stats.final_objective -= improvement;
        if improvement == 0 {
            break;
        }
    }
    debug_assert_eq!(stats.final_objective, objective.evaluate(h, p));
    stats
}

/// Greedy repair of an overloaded assignment. While some part exceeds
/// `(1+α)·⌈W/k⌉`, moves the node of the heaviest such part whose move to a
/// part with room costs the least (lighter target, then smaller ids, on
/// ties). Returns whether the bound holds afterwards.
pub fn rebalance(
    h: &Hypergraph,
    p: &mut PartitionAssignment,
    alpha: f64,
    objective: Objective,
) -> bool {
    let k = p.k();
    let limit = max_part_weight(h.total_node_weight(), k, alpha);
    loop {
        let Some(from) = (0..k)
            .filter(|&q| p.part_weight(q) > limit)
            .max_by_key(|&q| (p.part_weight(q), std::cmp::Reverse(q)))
        else {
            return true;
        };
        let mut best: Option<(Weight, Weight, NodeId, PartId)> = None;
        for v in (0..h.num_nodes()).filter(|&v| p.label(v) == from) {
            let w = h.node_weight(v);
            for to in (0..k).filter(|&to| to != from && p.part_weight(to) + w <= limit) {
                let key = (move_gain(h, p, v, to, objective), p.part_weight(to), v, to);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        match best {
            Some((_, _, v, to)) => p.move_node(h, v, to),
            None => return false,
        }
    }
}

/// Returns (objective decrease, moves kept).
fn fm_pass(
    h: &Hypergraph,
    p: &mut PartitionAssignment,
    limit: Weight,
    objective: Objective,
    stall_limit: usize,
    observe: &mut dyn FnMut(&PartitionAssignment),
) -> (Weight, usize) {
    observe(p);
    let n = h.num_nodes();
    let k = p.k();
    let mut phi = PinCounts::new(h, p);
    let mut gains = GainTable::new(h, p, objective);
    let mut locked = vec![false; n];
    let mut key: Vec<Option<Weight>> = vec![None; n];
    let mut queue: BTreeSet<(Weight, NodeId)> = BTreeSet::new();
    for v in 0..n {
        if is_boundary(h, &phi, p, v) {
            let g = gains.best(v, p.label(v));
            key[v] = Some(g);
            queue.insert((g, v));
        }
    }

    let mut moves: Vec<(NodeId, PartId, PartId)> = Vec::new();
    let mut current: Weight = 0;
    let mut best: Weight = 0;
    let mut best_len = 0;
    let mut stall = 0;
    let mut touched: Vec<NodeId> = Vec::new();
    let mut stamp = vec![usize::MAX; n];
    loop {
        // Queue keys are lower bounds on each node's feasible delta.
        let mut choice: Option<(Weight, NodeId, PartId)> = None;
        for &(lower, v) in &queue {
            if choice.is_some_and(|(d, _, _)| lower >= d) {
                break;
            }
            let from = p.label(v);
            let wv = h.node_weight(v);
            if p.part_weight(from) == wv {
                continue;
            }
            for to in 0..k {
                if to == from || p.part_weight(to) + wv > limit {
                    continue;
                }
                let d = gains.delta(v, to);
                if choice.is_none_or(|(bd, _, _)| d < bd) {
                    choice = Some((d, v, to));
                }
            }
        }
        let Some((d, v, to)) = choice else { break };
        let from = p.label(v);
        queue.remove(&(key[v].take().expect("queued node has a key"), v));
        locked[v] = true;
        phi.shift(h, v, from, to);
        p.move_node(h, v, to);
        current += d;
        moves.push((v, from, to));
        observe(p);

        for &e in h.incident_edges(v) {
            for &u in h.pins(e) {
                if !locked[u] && stamp[u] != moves.len() {
                    stamp[u] = moves.len();
                    touched.push(u);
                }
            }
        }
        for &u in &touched {
            gains.refresh(h, p, &phi, u, objective);
            if let Some(old) = key[u].take() {
                queue.remove(&(old, u));
            }
            if is_boundary(h, &phi, p, u) {
                let g = gains.best(u, p.label(u));
                key[u] = Some(g);
                queue.insert((g, u));
            }
        }
        touched.clear();

        if current < best {
            best = current;
            best_len = moves.len();
            stall = 0;
        } else {
            stall += 1;
            if stall >= stall_limit {
                break;
            }
        }
    }
    for &(v, from, _) in moves[best_len..].iter().rev() {
        p.move_node(h, v, from);
    }
    (-best, best_len)
}
