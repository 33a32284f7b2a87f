//! Hypergraph storage, star expansion and contraction.
//!
//! A [`Hypergraph`] keeps both incidence directions in compressed form:
//! `edge -> pins` and `node -> incident edges`. Construction normalizes the
//! input: pins of an edge are sorted and deduplicated and edges with fewer than
//! two distinct pins are dropped, since they can never be cut.

mod io;

use std::collections::HashMap;

pub use io::{
    load_hmetis, load_matrix_market, parse_hmetis, parse_matrix_market, write_hmetis,
    write_matrix_market, MatrixOrientation,
};

use crate::coarsening::Matching;
use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;
pub type Weight = i64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    node_weight: Vec<Weight>,
    edge_weight: Vec<Weight>,
    edge_offsets: Vec<usize>,
    pins: Vec<NodeId>,
    node_offsets: Vec<usize>,
    incidence: Vec<EdgeId>,
}

impl Hypergraph {
    /// Builds a normalized hypergraph from raw edges `(pins, weight)`.
    ///
    /// Pin lists may be unsorted and contain duplicates. Edges with fewer than
    /// two distinct pins are removed. Identical pin sets are kept as separate
    /// edges; only [`contract`](Hypergraph::contract) merges parallel edges.
    pub fn new(node_weight: Vec<Weight>, edges: Vec<(Vec<NodeId>, Weight)>) -> Result<Self> {
        let n = node_weight.len();
        if let Some(v) = node_weight.iter().position(|&w| w < 1) {
            return Err(Error::InvalidHypergraph(format!(
                "node {v} has non-positive weight {}",
                node_weight[v]
            )));
        }
        let mut edge_weight = Vec::with_capacity(edges.len());
        let mut edge_offsets = Vec::with_capacity(edges.len() + 1);
        edge_offsets.push(0);
        let mut pins = Vec::new();
        for (i, (mut edge_pins, w)) in edges.into_iter().enumerate() {
            if w < 1 {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {i} has non-positive weight {w}"
                )));
            }
            if let Some(&bad) = edge_pins.iter().find(|&&p| p >= n) {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {i} references node {bad} but there are only {n} nodes"
                )));
            }
            edge_pins.sort_unstable();
            edge_pins.dedup();
            if edge_pins.len() < 2 {
                continue;
            }
            pins.extend_from_slice(&edge_pins);
            edge_offsets.push(pins.len());
            edge_weight.push(w);
        }
        Ok(Self::from_csr(node_weight, edge_weight, edge_offsets, pins))
    }

    /// Unit node and edge weights.
    pub fn unweighted(num_nodes: usize, edges: Vec<Vec<NodeId>>) -> Result<Self> {
        Self::new(
            vec![1; num_nodes],
            edges.into_iter().map(|e| (e, 1)).collect(),
        )
    }

    // Pins must already be normalized.
    fn from_csr(
        node_weight: Vec<Weight>,
        edge_weight: Vec<Weight>,
        edge_offsets: Vec<usize>,
        pins: Vec<NodeId>,
    ) -> Self {
        let n = node_weight.len();
        let mut degree = vec![0usize; n + 1];
        for &p in &pins {
            degree[p + 1] += 1;
        }
        for v in 0..n {
            degree[v + 1] += degree[v];
        }
        let node_offsets = degree;
        let mut cursor = node_offsets.clone();
        let mut incidence = vec![0; pins.len()];
        for e in 0..edge_weight.len() {
            for &p in &pins[edge_offsets[e]..edge_offsets[e + 1]] {
                incidence[cursor[p]] = e;
                cursor[p] += 1;
            }
        }
        Hypergraph {
            node_weight,
            edge_weight,
            edge_offsets,
            pins,
            node_offsets,
            incidence,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.node_weight.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_weight.len()
    }

    pub fn num_pins(&self) -> usize {
        self.pins.len()
    }

    /// Sorted, distinct pins of `e`.
    pub fn pins(&self, e: EdgeId) -> &[NodeId] {
        &self.pins[self.edge_offsets[e]..self.edge_offsets[e + 1]]
    }

    /// Edges incident to `v`, ascending.
    pub fn incident_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.incidence[self.node_offsets[v]..self.node_offsets[v + 1]]
    }

    pub fn edge_size(&self, e: EdgeId) -> usize {
        self.edge_offsets[e + 1] - self.edge_offsets[e]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.node_offsets[v + 1] - self.node_offsets[v]
    }

    pub fn node_weight(&self, v: NodeId) -> Weight {
        self.node_weight[v]
    }

    pub fn edge_weight(&self, e: EdgeId) -> Weight {
        self.edge_weight[e]
    }

    pub fn node_weights(&self) -> &[Weight] {
        &self.node_weight
    }

    pub fn edge_weights(&self) -> &[Weight] {
        &self.edge_weight
    }

    pub fn total_node_weight(&self) -> Weight {
        self.node_weight.iter().sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = &[NodeId]> + '_ {
        (0..self.num_edges()).map(move |e| self.pins(e))
    }

    /// Distinct nodes sharing at least one edge with `v`, ascending, excluding `v`.
    pub fn neighbors(&self, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .incident_edges(v)
            .iter()
            .flat_map(|&e| self.pins(e).iter().copied())
            .filter(|&u| u != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Star expansion: one left vertex per node, one right vertex per edge.
    pub fn star_expand(&self) -> BipartiteGraph {
        let n = self.num_nodes();
        let m = self.num_edges();
        let mut offsets = Vec::with_capacity(n + m + 1);
        let mut adjacency = Vec::with_capacity(2 * self.num_pins());
        offsets.push(0);
        for v in 0..n {
            adjacency.extend(self.incident_edges(v).iter().map(|&e| n + e));
            offsets.push(adjacency.len());
        }
        for e in 0..m {
            adjacency.extend_from_slice(self.pins(e));
            offsets.push(adjacency.len());
        }
        BipartiteGraph {
            left_count: n,
            right_count: m,
            offsets,
            adjacency,
        }
    }

    /// Contracts every matched pair into one coarse node.
    ///
    /// Coarse ids are assigned in order of the smallest fine id of each group.
    /// Pins are remapped and deduplicated, edges that shrink to a single pin
    /// disappear, and edges with identical pin sets are merged by summing
    /// their weights (first occurrence keeps its position).
    pub fn contract(&self, matching: &Matching) -> Result<(Hypergraph, ContractionMap)> {
        let n = self.num_nodes();
        matching.validate(n)?;
        let mut map = vec![usize::MAX; n];
        let mut coarse_weight = Vec::with_capacity(n);
        for v in 0..n {
            if map[v] != usize::MAX {
                continue;
            }
            let id = coarse_weight.len();
            map[v] = id;
            let mut w = self.node_weight[v];
            if let Some(p) = matching.partner(v) {
                map[p] = id;
                w += self.node_weight[p];
            }
            coarse_weight.push(w);
        }

        let mut index: HashMap<Vec<NodeId>, usize> = HashMap::new();
        let mut coarse_edges: Vec<(Vec<NodeId>, Weight)> = Vec::new();
        for e in 0..self.num_edges() {
            let mut pins: Vec<NodeId> = self.pins(e).iter().map(|&p| map[p]).collect();
            pins.sort_unstable();
            pins.dedup();
            if pins.len() < 2 {
                continue;
            }
            match index.get(&pins) {
                Some(&i) => coarse_edges[i].1 += self.edge_weight[e],
                None => {
                    index.insert(pins.clone(), coarse_edges.len());
                    coarse_edges.push((pins, self.edge_weight[e]));
                }
            }
        }

        let mut edge_weight = Vec::with_capacity(coarse_edges.len());
        let mut edge_offsets = Vec::with_capacity(coarse_edges.len() + 1);
        let mut pins = Vec::new();
        edge_offsets.push(0);
        for (p, w) in coarse_edges {
            pins.extend(p);
            edge_offsets.push(pins.len());
            edge_weight.push(w);
        }
        let coarse_count = coarse_weight.len();
        Ok((
            Self::from_csr(coarse_weight, edge_weight, edge_offsets, pins),
            ContractionMap {
                fine_to_coarse: map,
                coarse_count,
            },
        ))
    }

    /// Sub-hypergraph induced by `nodes` (given in the order that defines the
    /// new dense ids). Each edge is restricted to the selected pins; when
    /// `drop_split_edges` is set, edges with any pin outside the selection are
    /// discarded instead.
    pub fn induced(&self, nodes: &[NodeId], drop_split_edges: bool) -> Hypergraph {
        let mut local = vec![usize::MAX; self.num_nodes()];
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i;
        }
        let node_weight = nodes.iter().map(|&v| self.node_weight[v]).collect();
        let mut edge_weight = Vec::new();
        let mut edge_offsets = vec![0];
        let mut pins = Vec::new();
        for e in 0..self.num_edges() {
            let inside: Vec<NodeId> = self
                .pins(e)
                .iter()
                .filter(|&&p| local[p] != usize::MAX)
                .map(|&p| local[p])
                .collect();
            if inside.len() < 2 || (drop_split_edges && inside.len() != self.edge_size(e)) {
                continue;
            }
            let start = pins.len();
            pins.extend(inside);
            pins[start..].sort_unstable();
            edge_offsets.push(pins.len());
            edge_weight.push(self.edge_weight[e]);
        }
        Self::from_csr(node_weight, edge_weight, edge_offsets, pins)
    }
}

/// Fine-to-coarse node map produced by [`Hypergraph::contract`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionMap {
    fine_to_coarse: Vec<NodeId>,
    coarse_count: usize,
}

impl ContractionMap {
    pub fn identity(n: usize) -> Self {
        ContractionMap {
            fine_to_coarse: (0..n).collect(),
            coarse_count: n,
        }
    }

    pub fn from_vec(fine_to_coarse: Vec<NodeId>) -> Result<Self> {
        let coarse_count = fine_to_coarse.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut seen = vec![false; coarse_count];
        for &c in &fine_to_coarse {
            seen[c] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Config("contraction map is not surjective".into()));
        }
        Ok(ContractionMap {
            fine_to_coarse,
            coarse_count,
        })
    }

    pub fn coarse(&self, fine: NodeId) -> NodeId {
        self.fine_to_coarse[fine]
    }

    pub fn fine_count(&self) -> usize {
        self.fine_to_coarse.len()
    }

    pub fn coarse_count(&self) -> usize {
        self.coarse_count
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.fine_to_coarse
    }

    /// `self` followed by `next`: fine nodes of `self` to coarse nodes of `next`.
    pub fn then(&self, next: &ContractionMap) -> ContractionMap {
        assert_eq!(self.coarse_count, next.fine_count());
        ContractionMap {
            fine_to_coarse: self
                .fine_to_coarse
                .iter()
                .map(|&c| next.coarse(c))
                .collect(),
            coarse_count: next.coarse_count,
        }
    }
}

/// Bipartite graph with left vertices `0..left_count` (nodes) and right
/// vertices `left_count..left_count + right_count` (hyperedges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    left_count: usize,
    right_count: usize,
    offsets: Vec<usize>,
    adjacency: Vec<usize>,
}

impl BipartiteGraph {
    pub fn left_count(&self) -> usize {
        self.left_count
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    pub fn num_vertices(&self) -> usize {
        self.left_count + self.right_count
    }

    /// Undirected edge count.
    pub fn num_edges(&self) -> usize {
        self.adjacency.len() / 2
    }

    /// Sorted neighbors of `x`.
    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adjacency[self.offsets[x]..self.offsets[x + 1]]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    pub fn is_left(&self, x: usize) -> bool {
        x < self.left_count
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// True when `a` and `b` have a common neighbor.
    pub fn share_neighbor(&self, a: usize, b: usize) -> bool {
        let (mut i, mut j) = (0, 0);
        let (na, nb) = (self.neighbors(a), self.neighbors(b));
        while i < na.len() && j < nb.len() {
            match na[i].cmp(&nb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// Common neighbors of `a` and `b`, ascending.
    pub fn common_neighbors(&self, a: usize, b: usize) -> Vec<usize> {
        let (mut i, mut j) = (0, 0);
        let (na, nb) = (self.neighbors(a), self.neighbors(b));
        let mut out = Vec::new();
        while i < na.len() && j < nb.len() {
            match na[i].cmp(&nb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(na[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }
}
