//! Node embeddings: storage, text I/O, coarse interpolation and the
//! star-expansion trainers.

mod algebraic;
mod samples;
mod train;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub use algebraic::{relaxation_step, AlgebraicCoordinates};
pub use samples::{alpha, fobe_samples, hobe_edge_target, hobe_scores, Sample, SampleSet};
pub use train::{
    embed_hypergraph, fobe_train, hobe_train, pair_gradient, pair_loss, EmbeddingMethod, Loss,
    TrainConfig,
};

use crate::error::{Error, Result};
use crate::hypergraph::{ContractionMap, NodeId};

pub const DEFAULT_DIMS: usize = 100;

/// One dense vector per node, all of the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dims: usize,
    data: Vec<f64>,
}

impl EmbeddingTable {
    /// Row-major `data` of `len * dims` finite values.
    pub fn new(dims: usize, data: Vec<f64>) -> Result<Self> {
        if dims == 0 {
            return Err(Error::InvalidEmbedding(
                "dimension must be at least 1".into(),
            ));
        }
        if !data.len().is_multiple_of(dims) {
            return Err(Error::InvalidEmbedding(format!(
                "{} values do not divide into rows of {dims}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidEmbedding(format!(
                "non-finite value in row {}",
                i / dims
            )));
        }
        Ok(EmbeddingTable { dims, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dims = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dims) {
            return Err(Error::InvalidEmbedding("rows differ in length".into()));
        }
        Self::new(dims, rows.concat())
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn vector(&self, v: NodeId) -> &[f64] {
        &self.data[v * self.dims..(v + 1) * self.dims]
    }

    pub(crate) fn vector_mut(&mut self, v: NodeId) -> &mut [f64] {
        &mut self.data[v * self.dims..(v + 1) * self.dims]
    }

    pub fn dot(&self, u: NodeId, v: NodeId) -> f64 {
        dot(self.vector(u), self.vector(v))
    }

    /// Every entry multiplied by `c`.
    pub fn scaled(&self, c: f64) -> EmbeddingTable {
        EmbeddingTable {
            dims: self.dims,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    /// Rows `nodes[0], nodes[1], ...` as a new table.
    pub fn select(&self, nodes: &[NodeId]) -> EmbeddingTable {
        let mut data = Vec::with_capacity(nodes.len() * self.dims);
        for &v in nodes {
            data.extend_from_slice(self.vector(v));
        }
        EmbeddingTable {
            dims: self.dims,
            data,
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mean of the original vectors of every node `v` with `map(v) == u`.
///
/// `map` is the cumulative map from original nodes to the current level.
pub fn interpolate_coarse(eps: &EmbeddingTable, map: &ContractionMap, u: NodeId) -> Vec<f64> {
    let mut acc = vec![0.0; eps.dims()];
    let mut count = 0usize;
    for v in 0..map.fine_count() {
        if map.coarse(v) == u {
            for (a, x) in acc.iter_mut().zip(eps.vector(v)) {
                *a += x;
            }
            count += 1;
        }
    }
    if count > 0 {
        acc.iter_mut().for_each(|a| *a /= count as f64);
    }
    acc
}

/// [`interpolate_coarse`] for every coarse node in one sweep over the originals.
pub fn coarse_embedding(eps: &EmbeddingTable, map: &ContractionMap) -> EmbeddingTable {
    let dims = eps.dims();
    let mut data = vec![0.0; map.coarse_count() * dims];
    let mut count = vec![0usize; map.coarse_count()];
    for v in 0..map.fine_count() {
        let u = map.coarse(v);
        count[u] += 1;
        for (a, x) in data[u * dims..(u + 1) * dims].iter_mut().zip(eps.vector(v)) {
            *a += x;
        }
    }
    for (u, &c) in count.iter().enumerate() {
        if c > 0 {
            data[u * dims..(u + 1) * dims]
                .iter_mut()
                .for_each(|a| *a /= c as f64);
        }
    }
    EmbeddingTable { dims, data }
}

pub fn load_embedding(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_embedding(&text, &path.display().to_string())
}

/// Parses `N dims` followed by `N` lines of `node_id f_1 .. f_dims`.
/// Rows may appear in any order but must cover `0..N` exactly once.
pub fn parse_embedding(text: &str, source_name: &str) -> Result<EmbeddingTable> {
    let src = source_name;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines
        .next()
        .ok_or_else(|| Error::parse(src, 1, "missing `N dims` header"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    let (n, dims) = match head.as_slice() {
        [n, d] => (
            n.parse::<usize>()
                .map_err(|_| Error::parse(src, hl, format!("invalid node count `{n}`")))?,
            d.parse::<usize>()
                .map_err(|_| Error::parse(src, hl, format!("invalid dimension `{d}`")))?,
        ),
        _ => return Err(Error::parse(src, hl, "header must be `N dims`")),
    };
    if dims == 0 {
        return Err(Error::parse(src, hl, "dimension must be at least 1"));
    }
    let mut data = vec![0.0; n * dims];
    let mut seen = vec![false; n];
    for (ln, line) in lines {
        let mut toks = line.split_whitespace();
        let id_tok = toks.next().unwrap_or("");
        let id: usize = id_tok
            .parse()
            .map_err(|_| Error::parse(src, ln, format!("invalid node id `{id_tok}`")))?;
        if id >= n {
            return Err(Error::parse(
                src,
                ln,
                format!("node id {id} outside 0..{n}"),
            ));
        }
        if seen[id] {
            return Err(Error::parse(src, ln, format!("duplicate node id {id}")));
        }
        seen[id] = true;
        let values: Vec<&str> = toks.collect();
        if values.len() != dims {
            return Err(Error::parse(
                src,
                ln,
                format!(
                    "dimension mismatch: expected {dims} values, found {}",
                    values.len()
                ),
            ));
        }
        for (slot, tok) in data[id * dims..(id + 1) * dims].iter_mut().zip(values) {
            let x: f64 = tok
                .parse()
                .map_err(|_| Error::parse(src, ln, format!("invalid value `{tok}`")))?;
            if !x.is_finite() {
                return Err(Error::parse(src, ln, format!("non-finite value `{tok}`")));
            }
            *slot = x;
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::parse(
            src,
            text.lines().count(),
            format!("missing node {missing}"),
        ));
    }
    EmbeddingTable::new(dims, data)
}

/// Canonical text form: ids ascending, 17 significant digits.
pub fn write_embedding(eps: &EmbeddingTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", eps.len(), eps.dims());
    for v in 0..eps.len() {
        let _ = write!(out, "{v}");
        for x in eps.vector(v) {
            let _ = write!(out, " {x:.16e}");
        }
        out.push('\n');
    }
    out
}
