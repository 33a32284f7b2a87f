//! Partition labels, objectives and the balance constraint.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{EdgeId, Hypergraph, NodeId, Weight};

pub type PartId = usize;

/// Labels in `0..k` with cached part weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionAssignment {
    labels: Vec<PartId>,
    k: usize,
    part_weight: Vec<Weight>,
}

impl PartitionAssignment {
    pub fn new(h: &Hypergraph, labels: Vec<PartId>, k: usize) -> Result<Self> {
        if labels.len() != h.num_nodes() {
            return Err(Error::Config(format!(
                "assignment has {} labels for {} nodes",
                labels.len(),
                h.num_nodes()
            )));
        }
        let mut part_weight = vec![0; k];
        for (v, &p) in labels.iter().enumerate() {
            if p >= k {
                return Err(Error::Config(format!("node {v} has label {p} >= k = {k}")));
            }
            part_weight[p] += h.node_weight(v);
        }
        Ok(PartitionAssignment {
            labels,
            k,
            part_weight,
        })
    }

    pub fn label(&self, v: NodeId) -> PartId {
        self.labels[v]
    }

    pub fn labels(&self) -> &[PartId] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn part_weight(&self, p: PartId) -> Weight {
        self.part_weight[p]
    }

    pub fn part_weights(&self) -> &[Weight] {
        &self.part_weight
    }

    pub fn max_part_weight(&self) -> Weight {
        self.part_weight.iter().copied().max().unwrap_or(0)
    }

    pub fn move_node(&mut self, h: &Hypergraph, v: NodeId, to: PartId) {
        let from = self.labels[v];
        let w = h.node_weight(v);
        self.part_weight[from] -= w;
        self.part_weight[to] += w;
        self.labels[v] = to;
    }

    /// Imbalance relative to the ideal part weight `⌈W/k⌉`:
    /// `max_p w(p) / ⌈W/k⌉ - 1`.
    pub fn imbalance(&self) -> f64 {
        let total: Weight = self.part_weight.iter().sum();
        let ideal = ideal_part_weight(total, self.k);
        if ideal == 0 {
            return 0.0;
        }
        self.max_part_weight() as f64 / ideal as f64 - 1.0
    }

    pub fn into_labels(self) -> Vec<PartId> {
        self.labels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Cut,
    /// Connectivity, also known as `(λ − 1)` or km1.
    #[serde(rename = "km1")]
    Connectivity,
}

impl Objective {
    pub fn evaluate(self, h: &Hypergraph, p: &PartitionAssignment) -> Weight {
        match self {
            Objective::Cut => weighted_cut(h, p),
            Objective::Connectivity => weighted_connectivity(h, p),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Cut => "cut",
            Objective::Connectivity => "km1",
        }
    }
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cut" => Ok(Objective::Cut),
            "km1" => Ok(Objective::Connectivity),
            other => Err(Error::Config(format!(
                "unknown objective `{other}` (expected cut or km1)"
            ))),
        }
    }
}

/// Number of distinct parts touched by the pins of `e`.
pub fn lambda(h: &Hypergraph, p: &PartitionAssignment, e: EdgeId) -> usize {
    let mut seen: Vec<PartId> = h.pins(e).iter().map(|&v| p.label(v)).collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

pub fn weighted_cut(h: &Hypergraph, p: &PartitionAssignment) -> Weight {
    (0..h.num_edges())
        .filter(|&e| lambda(h, p, e) > 1)
        .map(|e| h.edge_weight(e))
        .sum()
}

pub fn weighted_connectivity(h: &Hypergraph, p: &PartitionAssignment) -> Weight {
    (0..h.num_edges())
        .map(|e| (lambda(h, p, e) as Weight - 1) * h.edge_weight(e))
        .sum()
}

/// `⌈total / k⌉`.
pub fn ideal_part_weight(total: Weight, k: usize) -> Weight {
    let k = k as Weight;
    (total + k - 1) / k
}

/// Largest integer part weight allowed by `(1+α)·⌈W/k⌉`.
pub fn max_part_weight(total: Weight, k: usize, alpha: f64) -> Weight {
    let bound = (1.0 + alpha) * ideal_part_weight(total, k) as f64;
    // Weights are integers; the epsilon absorbs products like 0.7 * 10 = 6.999...
    (bound + 1e-9).floor() as Weight
}

pub fn check_balance(h: &Hypergraph, p: &PartitionAssignment, alpha: f64) -> bool {
    let limit = max_part_weight(h.total_node_weight(), p.k(), alpha);
    p.part_weights().iter().all(|&w| w <= limit)
}

/// Balanced and no part left empty.
pub fn is_feasible(h: &Hypergraph, p: &PartitionAssignment, alpha: f64) -> bool {
    check_balance(h, p, alpha) && p.part_weights().iter().all(|&w| w > 0)
}

/// One line per node holding its 0-indexed part.
pub fn write_partition(p: &PartitionAssignment) -> String {
    let mut out = String::with_capacity(p.labels().len() * 3);
    for &l in p.labels() {
        let _ = writeln!(out, "{l}");
    }
    out
}

/// Parses a partition file. `k` is taken as one more than the largest label
/// unless given.
pub fn parse_partition(
    text: &str,
    source_name: &str,
    h: &Hypergraph,
    k: Option<usize>,
) -> Result<PartitionAssignment> {
    let mut labels = Vec::with_capacity(h.num_nodes());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let l: PartId = line
            .parse()
            .map_err(|_| Error::parse(source_name, i + 1, format!("invalid part id `{line}`")))?;
        labels.push(l);
    }
    if labels.len() != h.num_nodes() {
        return Err(Error::parse(
            source_name,
            text.lines().count(),
            format!("{} labels for {} nodes", labels.len(), h.num_nodes()),
        ));
    }
    let k = k.unwrap_or_else(|| labels.iter().max().map_or(1, |m| m + 1));
    PartitionAssignment::new(h, labels, k)
}

pub fn load_partition(
    path: impl AsRef<Path>,
    h: &Hypergraph,
    k: Option<usize>,
) -> Result<PartitionAssignment> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_partition(&text, &path.display().to_string(), h, k)
}
