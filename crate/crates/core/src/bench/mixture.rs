use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, NodeId};
use crate::seed::{rng, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub nodes: usize,
    pub edges: usize,
    /// Edge sizes are drawn uniformly from `2..=round(2·mean − 2)`.
    pub mean_edge_size: f64,
}

impl ComponentSpec {
    fn max_edge_size(&self) -> usize {
        ((2.0 * self.mean_edge_size - 2.0).round() as usize).max(2)
    }
}

/// Generator parameters; serialized as the sidecar of a generated file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub components: Vec<ComponentSpec>,
    /// Cross edges as a fraction of the component edge total.
    pub cross_fraction: f64,
    /// Uniformly random edges as a fraction of the component edge total.
    pub noise_fraction: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    pub hypergraph: Hypergraph,
    /// Component of every node.
    pub component: Vec<usize>,
    pub cross_edges: usize,
    pub noise_edges: usize,
}

fn validate(spec: &MixtureSpec) -> Result<()> {
    if spec.components.is_empty() {
        return Err(Error::Config(
            "a mixture needs at least one component".into(),
        ));
    }
    for (i, c) in spec.components.iter().enumerate() {
        if !(c.mean_edge_size.is_finite() && c.mean_edge_size >= 2.0) {
            return Err(Error::Config(format!(
                "component {i}: mean edge size must be at least 2, got {}",
                c.mean_edge_size
            )));
        }
        if c.max_edge_size() > c.nodes {
            return Err(Error::Config(format!(
                "component {i}: edges of size {} do not fit in {} nodes",
                c.max_edge_size(),
                c.nodes
            )));
        }
    }
    for (name, f) in [
        ("cross", spec.cross_fraction),
        ("noise", spec.noise_fraction),
    ] {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Config(format!(
                "{name} fraction {f} is outside [0, 1]"
            )));
        }
    }
    if spec.cross_fraction > 0.0 && spec.components.len() < 2 {
        return Err(Error::Config(
            "cross edges need at least two components".into(),
        ));
    }
    Ok(())
}

fn draw_pins(rng: &mut Rng, pool: &[NodeId], size: usize, out: &mut Vec<NodeId>) {
    for i in index::sample(rng, pool.len(), size) {
        out.push(pool[i]);
    }
}

/// Disjoint random components joined by a few cross edges and noise edges.
///
/// A cross edge links one random node of each of two distinct components.
/// Node ids are shuffled so components are not contiguous id ranges. Pins of
/// an edge are distinct, so every requested edge survives normalization and
/// the edge count is components + cross + noise.
pub fn generate_mixture(spec: &MixtureSpec) -> Result<Mixture> {
    validate(spec)?;
    let mut rng = rng(spec.seed);
    let n: usize = spec.components.iter().map(|c| c.nodes).sum();
    let mut ids: Vec<NodeId> = (0..n).collect();
    ids.shuffle(&mut rng);

    let mut members: Vec<Vec<NodeId>> = Vec::with_capacity(spec.components.len());
    let mut component = vec![0; n];
    let mut next = 0;
    for (ci, c) in spec.components.iter().enumerate() {
        let block = ids[next..next + c.nodes].to_vec();
        next += c.nodes;
        for &v in &block {
            component[v] = ci;
        }
        members.push(block);
    }

    let mut edges: Vec<Vec<NodeId>> = Vec::new();
    for (c, pool) in spec.components.iter().zip(&members) {
        for _ in 0..c.edges {
            let size = rng.gen_range(2..=c.max_edge_size());
            let mut pins = Vec::with_capacity(size);
            draw_pins(&mut rng, pool, size, &mut pins);
            edges.push(pins);
        }
    }

    let base = edges.len() as f64;
    let cross_edges = (spec.cross_fraction * base).round() as usize;
    let noise_edges = (spec.noise_fraction * base).round() as usize;
    let ncomp = spec.components.len();
    for _ in 0..cross_edges {
        let a = rng.gen_range(0..ncomp);
        let mut b = rng.gen_range(0..ncomp - 1);
        if b >= a {
            b += 1;
        }
        let pins = vec![
            members[a][rng.gen_range(0..members[a].len())],
            members[b][rng.gen_range(0..members[b].len())],
        ];
        edges.push(pins);
    }
    let max_noise_size = spec
        .components
        .iter()
        .map(|c| c.max_edge_size())
        .max()
        .unwrap_or(2)
        .min(n);
    if noise_edges > 0 && n < 2 {
        return Err(Error::Config("noise edges need at least two nodes".into()));
    }
    for _ in 0..noise_edges {
        let size = rng.gen_range(2..=max_noise_size);
        let mut pins = Vec::with_capacity(size);
        draw_pins(&mut rng, &ids, size, &mut pins);
        edges.push(pins);
    }

    Ok(Mixture {
        hypergraph: Hypergraph::unweighted(n, edges)?,
        component,
        cross_edges,
        noise_edges,
    })
}
