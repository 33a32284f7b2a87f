//! Observation sets for the first- and higher-order bipartite trainers.
//!
//! Positives are every bipartite edge `(u, x)` plus, for each such edge, one
//! sampled co-neighbor on each side: a `v ∈ Γ(x) \ {u}` paired with `u` and a
//! `y ∈ Γ(u) \ {x}` paired with `x`. Negatives are uniform vertex pairs that
//! are neither adjacent nor share a neighbor.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::hypergraph::BipartiteGraph;
use crate::seed::{rng, Rng};

pub const DEFAULT_NEGATIVES_PER_POSITIVE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub u: usize,
    pub v: usize,
    /// Observed score in `[0, 1]`.
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    /// Vertex ids range over `0..num_vertices`.
    pub num_vertices: usize,
    pub pairs: Vec<Sample>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Relation {
    Edge,
    CoNeighbor,
}

fn positive_pairs(g: &BipartiteGraph, rng: &mut Rng) -> Vec<(usize, usize, Relation)> {
    let mut out = Vec::with_capacity(3 * g.num_edges());
    for u in 0..g.left_count() {
        for &x in g.neighbors(u) {
            out.push((u, x, Relation::Edge));
            if let Some(v) = pick_other(g.neighbors(x), u, rng) {
                out.push((u, v, Relation::CoNeighbor));
            }
            if let Some(y) = pick_other(g.neighbors(u), x, rng) {
                out.push((x, y, Relation::CoNeighbor));
            }
        }
    }
    out
}

/// Uniform element of `list` other than `exclude`, if any.
fn pick_other(list: &[usize], exclude: usize, rng: &mut Rng) -> Option<usize> {
    if list.len() < 2 {
        return None;
    }
    loop {
        let c = *list.choose(rng).expect("non-empty");
        if c != exclude {
            return Some(c);
        }
    }
}

fn negative_pairs(g: &BipartiteGraph, count: usize, rng: &mut Rng) -> Vec<(usize, usize)> {
    let n = g.num_vertices();
    let mut out = Vec::with_capacity(count);
    if n < 2 {
        return out;
    }
    let max_tries = 20 * count.max(1);
    let mut tries = 0;
    while out.len() < count && tries < max_tries {
        tries += 1;
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b || g.adjacent(a, b) || g.share_neighbor(a, b) {
            continue;
        }
        out.push((a, b));
    }
    out
}

/// First-order observations: target 1 for edges and co-neighbors, 0 for
/// sampled unrelated pairs.
pub fn fobe_samples(g: &BipartiteGraph, negatives_per_positive: usize, seed: u64) -> SampleSet {
    let mut rng = rng(seed);
    let positives = positive_pairs(g, &mut rng);
    let negatives = negative_pairs(g, negatives_per_positive * positives.len(), &mut rng);
    let pairs = positives
        .into_iter()
        .map(|(u, v, _)| Sample { u, v, target: 1.0 })
        .chain(
            negatives
                .into_iter()
                .map(|(u, v)| Sample { u, v, target: 0.0 }),
        )
        .collect();
    SampleSet {
        num_vertices: g.num_vertices(),
        pairs,
    }
}

/// `max_{x ∈ Γ(u) ∩ Γ(v)} min(s(u, x), s(v, x))`, or 0 without a common neighbor.
pub fn alpha(g: &BipartiteGraph, s: &impl Fn(usize, usize) -> f64, u: usize, v: usize) -> f64 {
    g.common_neighbors(u, v)
        .into_iter()
        .map(|x| s(u, x).min(s(v, x)))
        .fold(0.0, f64::max)
}

/// Target for an adjacent pair: the best `α` reachable through either
/// endpoint's neighborhood.
pub fn hobe_edge_target(
    g: &BipartiteGraph,
    s: &impl Fn(usize, usize) -> f64,
    u: usize,
    v: usize,
) -> f64 {
    let through_v = g.neighbors(v).iter().map(|&x| alpha(g, s, u, x));
    let through_u = g.neighbors(u).iter().map(|&x| alpha(g, s, x, v));
    through_v.chain(through_u).fold(0.0, f64::max)
}

/// Higher-order observations weighted by the similarity `s` (normally
/// [`AlgebraicCoordinates::similarity`](super::AlgebraicCoordinates::similarity)).
pub fn hobe_scores(
    g: &BipartiteGraph,
    s: impl Fn(usize, usize) -> f64,
    negatives_per_positive: usize,
    seed: u64,
) -> SampleSet {
    let mut rng = rng(seed);
    let positives = positive_pairs(g, &mut rng);
    let negatives = negative_pairs(g, negatives_per_positive * positives.len(), &mut rng);

    let mut alpha_cache: HashMap<(usize, usize), f64> = HashMap::new();
    let mut cached_alpha = |a: usize, b: usize| {
        let key = (a.min(b), a.max(b));
        *alpha_cache.entry(key).or_insert_with(|| alpha(g, &s, a, b))
    };
    let mut pairs = Vec::with_capacity(positives.len() + negatives.len());
    for (u, v, rel) in positives {
        let target = match rel {
            Relation::CoNeighbor => cached_alpha(u, v),
            Relation::Edge => {
                let through_v = g
                    .neighbors(v)
                    .iter()
                    .map(|&x| cached_alpha(u, x))
                    .fold(0.0, f64::max);
                let through_u = g
                    .neighbors(u)
                    .iter()
                    .map(|&x| cached_alpha(x, v))
                    .fold(0.0, f64::max);
                through_v.max(through_u)
            }
        };
        pairs.push(Sample {
            u,
            v,
            target: target.clamp(0.0, 1.0),
        });
    }
    pairs.extend(
        negatives
            .into_iter()
            .map(|(u, v)| Sample { u, v, target: 0.0 }),
    );
    SampleSet {
        num_vertices: g.num_vertices(),
        pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hypergraph;

    fn graph() -> BipartiteGraph {
        // Two separate groups so that unrelated pairs exist.
        Hypergraph::unweighted(
            8,
            vec![vec![0, 1, 2], vec![2, 3], vec![4, 5], vec![5, 6, 7]],
        )
        .unwrap()
        .star_expand()
    }

    #[test]
    fn fobe_targets_follow_relations() {
        let g = graph();
        let s = fobe_samples(&g, 5, 1);
        assert!(s.pairs.iter().all(|p| p.u != p.v));
        for p in &s.pairs {
            let related = g.adjacent(p.u, p.v) || g.share_neighbor(p.u, p.v);
            assert_eq!(p.target == 1.0, related, "{p:?}");
        }
        // Every bipartite edge appears as a positive.
        for u in 0..g.left_count() {
            for &x in g.neighbors(u) {
                assert!(s
                    .pairs
                    .iter()
                    .any(|p| p.u == u && p.v == x && p.target == 1.0));
            }
        }
        assert!(s.pairs.iter().any(|p| p.target == 0.0));
        assert!(s
            .pairs
            .iter()
            .any(|p| p.target == 1.0 && g.share_neighbor(p.u, p.v)));
    }

    #[test]
    fn alpha_with_single_shared_neighbor() {
        let g = graph();
        // Nodes 0 and 1 share only edge-vertex 8.
        let s = |a: usize, b: usize| -> f64 {
            match (a.min(b), a.max(b)) {
                (0, 8) => 0.3,
                (1, 8) => 0.7,
                _ => 0.5,
            }
        };
        assert_eq!(alpha(&g, &s, 0, 1), 0.3);
        assert_eq!(alpha(&g, &s, 0, 4), 0.0);
    }

    #[test]
    fn converged_similarity_gives_unit_targets() {
        let g = graph();
        let set = hobe_scores(&g, |_, _| 1.0, 2, 9);
        for p in &set.pairs {
            let related = g.adjacent(p.u, p.v) || g.share_neighbor(p.u, p.v);
            assert_eq!(p.target, if related { 1.0 } else { 0.0 }, "{p:?}");
        }
    }

    #[test]
    fn hobe_edge_target_is_max_over_neighborhoods() {
        let g = graph();
        let s = |a: usize, b: usize| ((a * 7 + b * 3) % 10) as f64 / 10.0;
        let set = hobe_scores(&g, s, 0, 4);
        for p in set.pairs.iter().filter(|p| g.adjacent(p.u, p.v)) {
            assert_eq!(p.target, hobe_edge_target(&g, &s, p.u, p.v));
        }
        for p in set.pairs.iter().filter(|p| g.share_neighbor(p.u, p.v)) {
            assert_eq!(p.target, alpha(&g, &s, p.u, p.v));
        }
    }
}
