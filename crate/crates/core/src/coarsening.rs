//! Pair scoring, greedy matching and the multilevel coarsening driver.
//!
//! Two scorers share one matching loop:
//!
//! * heavy-edge: nodes are visited in a seeded random order and each picks the
//!   neighbor maximizing `S_E(u, v) = Σ_{e ∋ u,v} w_e / (|e| − 1)`;
//! * embedding: nodes are visited by decreasing
//!   `S_O(u) = max_v ε(u)·ε(v) / (w_u w_v)` and each picks the neighbor
//!   maximizing `S_ε(u, v) = ε(u)·ε(v) / (w_u w_v) · S_E(u, v)`.
//!
//! A pair is only eligible when `w_u + w_v < w_T`. Every tie is broken
//! towards the smaller node id.

use std::cmp::Ordering;

use rand::seq::SliceRandom;

use crate::embedding::{coarse_embedding, dot, EmbeddingTable};
use crate::error::{Error, Result};
use crate::hypergraph::{ContractionMap, Hypergraph, NodeId, Weight};
use crate::seed::{derive_seed, rng};

/// Symmetric partner array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    partner: Vec<Option<NodeId>>,
}

impl Matching {
    pub fn empty(n: usize) -> Self {
        Matching {
            partner: vec![None; n],
        }
    }

    pub fn from_pairs(n: usize, pairs: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut m = Matching::empty(n);
        for &(u, v) in pairs {
            if u >= n || v >= n {
                return Err(Error::InvalidMatching(format!(
                    "pair ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidMatching(format!(
                    "node {u} matched with itself"
                )));
            }
            if m.partner[u].is_some() || m.partner[v].is_some() {
                return Err(Error::InvalidMatching(format!(
                    "pair ({u}, {v}) reuses a matched node"
                )));
            }
            m.partner[u] = Some(v);
            m.partner[v] = Some(u);
        }
        Ok(m)
    }

    pub fn partner(&self, v: NodeId) -> Option<NodeId> {
        self.partner[v]
    }

    pub fn len(&self) -> usize {
        self.partner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }

    /// Matched pairs `(u, v)` with `u < v`, ascending.
    pub fn pairs(&self) -> Vec<(NodeId, NodeId)> {
        self.partner
            .iter()
            .enumerate()
            .filter_map(|(u, p)| p.filter(|&v| u < v).map(|v| (u, v)))
            .collect()
    }

    pub fn num_pairs(&self) -> usize {
        self.partner.iter().filter(|p| p.is_some()).count() / 2
    }

    /// Checks size, range, symmetry and the absence of self-matches.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.partner.len() != n {
            return Err(Error::InvalidMatching(format!(
                "matching covers {} nodes, hypergraph has {n}",
                self.partner.len()
            )));
        }
        for (u, p) in self.partner.iter().enumerate() {
            if let Some(v) = *p {
                if v >= n {
                    return Err(Error::InvalidMatching(format!(
                        "node {u} matched to unknown {v}"
                    )));
                }
                if v == u {
                    return Err(Error::InvalidMatching(format!(
                        "node {u} matched with itself"
                    )));
                }
                if self.partner[v] != Some(u) {
                    return Err(Error::InvalidMatching(format!(
                        "asymmetric pair ({u}, {v})"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoarseningMode {
    /// Contract a full matching per level.
    LogN,
    /// Contract a single pair per level.
    NLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scorer {
    HeavyEdge,
    Embedding,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoarseningConfig {
    /// `w_T`; `None` selects `max(4, ⌈W / 8k⌉)`.
    pub weight_tolerance: Option<Weight>,
    pub mode: CoarseningMode,
    /// `None` selects `max(60, 15k)`.
    pub stop_node_count: Option<usize>,
    /// `None`: 64 levels in log-n mode, unbounded in n-level mode.
    pub max_levels: Option<usize>,
    pub scorer: Scorer,
}

impl Default for CoarseningConfig {
    fn default() -> Self {
        CoarseningConfig {
            weight_tolerance: None,
            mode: CoarseningMode::LogN,
            stop_node_count: None,
            max_levels: None,
            scorer: Scorer::HeavyEdge,
        }
    }
}

/// Concrete limits after filling in the `k`-dependent defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoarseningLimits {
    pub weight_tolerance: Weight,
    pub stop_node_count: usize,
    pub max_levels: usize,
}

impl CoarseningConfig {
    pub fn limits(&self, total_weight: Weight, k: usize) -> CoarseningLimits {
        let per = 8 * k as Weight;
        CoarseningLimits {
            weight_tolerance: self
                .weight_tolerance
                .unwrap_or_else(|| ((total_weight + per - 1) / per).max(4)),
            stop_node_count: self.stop_node_count.unwrap_or((15 * k).max(60)),
            max_levels: self.max_levels.unwrap_or(match self.mode {
                CoarseningMode::LogN => 64,
                CoarseningMode::NLevel => usize::MAX,
            }),
        }
    }
}

/// `Σ_{e ∋ u,v} w_e / (|e| − 1)`.
pub fn heavy_edge_score(h: &Hypergraph, u: NodeId, v: NodeId) -> f64 {
    let (eu, ev) = (h.incident_edges(u), h.incident_edges(v));
    let (mut i, mut j) = (0, 0);
    let mut score = 0.0;
    while i < eu.len() && j < ev.len() {
        match eu[i].cmp(&ev[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                let e = eu[i];
                score += h.edge_weight(e) as f64 / (h.edge_size(e) - 1) as f64;
                i += 1;
                j += 1;
            }
        }
    }
    score
}

fn weighted_dot(h: &Hypergraph, eps: &EmbeddingTable, u: NodeId, v: NodeId) -> f64 {
    dot(eps.vector(u), eps.vector(v)) / (h.node_weight(u) * h.node_weight(v)) as f64
}

/// `S_O(u)`, or `None` when `u` shares no edge with another node.
pub fn visit_order_score(h: &Hypergraph, eps: &EmbeddingTable, u: NodeId) -> Option<f64> {
    h.neighbors(u)
        .into_iter()
        .map(|v| weighted_dot(h, eps, u, v))
        .reduce(f64::max)
}

/// `S_ε(u, v)`: weight-normalized, unnormalized-length dot product times `S_E`.
pub fn embedding_score(h: &Hypergraph, eps: &EmbeddingTable, u: NodeId, v: NodeId) -> f64 {
    weighted_dot(h, eps, u, v) * heavy_edge_score(h, u, v)
}

/// Parameters of one matching pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchRule {
    pub weight_tolerance: Weight,
    pub scorer: Scorer,
    /// Visit-order seed for the heavy-edge scorer; unused by the embedding scorer.
    pub seed: u64,
    /// Stop after this many pairs (`Some(1)` for n-level coarsening).
    pub max_pairs: Option<usize>,
}

/// Order in which nodes are offered a partner.
pub fn visit_order(
    h: &Hypergraph,
    eps: Option<&EmbeddingTable>,
    scorer: Scorer,
    seed: u64,
) -> Vec<NodeId> {
    let n = h.num_nodes();
    let mut order: Vec<NodeId> = (0..n).collect();
    match (scorer, eps) {
        (Scorer::Embedding, Some(eps)) => {
            let mut mark = vec![usize::MAX; n];
            let scores: Vec<Option<f64>> = (0..n)
                .map(|u| {
                    let mut best: Option<f64> = None;
                    for &e in h.incident_edges(u) {
                        for &v in h.pins(e) {
                            if v == u || mark[v] == u {
                                continue;
                            }
                            mark[v] = u;
                            let s = weighted_dot(h, eps, u, v);
                            best = Some(best.map_or(s, |b| b.max(s)));
                        }
                    }
                    best
                })
                .collect();
            order.sort_by(|&a, &b| match (scores[a], scores[b]) {
                (Some(x), Some(y)) => y.total_cmp(&x).then(a.cmp(&b)),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => a.cmp(&b),
            });
        }
        _ => order.shuffle(&mut rng(seed)),
    }
    order
}

/// One greedy matching pass.
pub fn match_level(
    h: &Hypergraph,
    eps: Option<&EmbeddingTable>,
    rule: &MatchRule,
) -> Result<Matching> {
    let n = h.num_nodes();
    let eps = match rule.scorer {
        Scorer::Embedding => {
            let eps = eps.ok_or_else(|| {
                Error::Config("embedding scorer requires an embedding table".into())
            })?;
            if eps.len() != n {
                return Err(Error::InvalidEmbedding(format!(
                    "embedding has {} rows for {n} nodes",
                    eps.len()
                )));
            }
            Some(eps)
        }
        Scorer::HeavyEdge => None,
    };
    let order = visit_order(h, eps, rule.scorer, rule.seed);
    let mut matching = Matching::empty(n);
    let mut acc = vec![0.0f64; n];
    let mut touched: Vec<NodeId> = Vec::new();
    let mut pairs = 0usize;
    for u in order {
        if matching.partner[u].is_some() {
            continue;
        }
        let wu = h.node_weight(u);
        for &e in h.incident_edges(u) {
            let share = h.edge_weight(e) as f64 / (h.edge_size(e) - 1) as f64;
            for &v in h.pins(e) {
                if v == u
                    || matching.partner[v].is_some()
                    || wu + h.node_weight(v) >= rule.weight_tolerance
                {
                    continue;
                }
                if acc[v] == 0.0 {
                    touched.push(v);
                }
                acc[v] += share;
            }
        }
        touched.sort_unstable();
        let mut best: Option<(NodeId, f64)> = None;
        for &v in &touched {
            let s = match eps {
                Some(eps) => weighted_dot(h, eps, u, v) * acc[v],
                None => acc[v],
            };
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((v, s));
            }
            acc[v] = 0.0;
        }
        touched.clear();
        if let Some((v, _)) = best {
            matching.partner[u] = Some(v);
            matching.partner[v] = Some(u);
            pairs += 1;
            if rule.max_pairs.is_some_and(|m| pairs >= m) {
                break;
            }
        }
    }
    Ok(matching)
}

/// One coarse level.
#[derive(Debug, Clone)]
pub struct Level {
    pub hypergraph: Hypergraph,
    /// From the previous (finer) level to this one.
    pub map: ContractionMap,
    /// From the original hypergraph to this level.
    pub cumulative: ContractionMap,
    /// Interpolated embedding when coarsening with the embedding scorer.
    pub embedding: Option<EmbeddingTable>,
}

/// Coarse levels, finest first. The input hypergraph itself is not stored.
#[derive(Debug, Clone, Default)]
pub struct LevelHierarchy {
    pub levels: Vec<Level>,
}

impl LevelHierarchy {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn coarsest<'a>(&'a self, original: &'a Hypergraph) -> &'a Hypergraph {
        self.levels.last().map_or(original, |l| &l.hypergraph)
    }
}

/// Repeated matching and contraction until the hypergraph is small enough,
/// a log-n level removes fewer than 5% of the nodes, no pair can be matched,
/// or the level budget is exhausted.
pub fn coarsen(
    h: &Hypergraph,
    eps: Option<&EmbeddingTable>,
    cfg: &CoarseningConfig,
    k: usize,
    seed: u64,
) -> Result<LevelHierarchy> {
    let limits = cfg.limits(h.total_node_weight(), k);
    let mut hierarchy = LevelHierarchy::default();
    if cfg.scorer == Scorer::Embedding && eps.is_none() {
        return Err(Error::Config(
            "embedding scorer requires an embedding table".into(),
        ));
    }
    loop {
        let (current, current_eps) = match hierarchy.levels.last() {
            Some(l) => (&l.hypergraph, l.embedding.as_ref()),
            None => (h, eps),
        };
        let n = current.num_nodes();
        if n <= limits.stop_node_count || hierarchy.depth() >= limits.max_levels {
            break;
        }
        let rule = MatchRule {
            weight_tolerance: limits.weight_tolerance,
            scorer: cfg.scorer,
            seed: derive_seed(seed, hierarchy.depth() as u64),
            max_pairs: match cfg.mode {
                CoarseningMode::LogN => None,
                CoarseningMode::NLevel => Some(1),
            },
        };
        let matching = match_level(current, current_eps, &rule)?;
        if matching.num_pairs() == 0 {
            break;
        }
        let (coarse, map) = current.contract(&matching)?;
        let stalled =
            cfg.mode == CoarseningMode::LogN && (coarse.num_nodes() as f64) > 0.95 * n as f64;
        let cumulative = match hierarchy.levels.last() {
            Some(l) => l.cumulative.then(&map),
            None => map.clone(),
        };
        let embedding = match (cfg.scorer, eps) {
            (Scorer::Embedding, Some(eps)) => Some(coarse_embedding(eps, &cumulative)),
            _ => None,
        };
        hierarchy.levels.push(Level {
            hypergraph: coarse,
            map,
            cumulative,
            embedding,
        });
        if stalled {
            break;
        }
    }
    Ok(hierarchy)
}
