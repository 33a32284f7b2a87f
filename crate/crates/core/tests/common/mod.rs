#![allow(dead_code)]

use embcoarse::coarsening::Matching;
use embcoarse::embedding::EmbeddingTable;
use embcoarse::{Hypergraph, PartitionAssignment, Weight};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` nodes, `m` edges of 2..=max_size distinct pins; weights in 1..=max_weight.
pub fn random_hypergraph(
    seed: u64,
    n: usize,
    m: usize,
    max_size: usize,
    max_weight: Weight,
) -> Hypergraph {
    let mut r = rng(seed);
    let nodes: Vec<usize> = (0..n).collect();
    let node_weight = (0..n).map(|_| r.gen_range(1..=max_weight)).collect();
    let edges = (0..m)
        .map(|_| {
            let size = r.gen_range(2..=max_size.min(n).max(2));
            let pins = nodes.choose_multiple(&mut r, size).copied().collect();
            (pins, r.gen_range(1..=max_weight))
        })
        .collect();
    Hypergraph::new(node_weight, edges).unwrap()
}

pub fn random_assignment(h: &Hypergraph, k: usize, seed: u64) -> PartitionAssignment {
    let mut r = rng(seed);
    let labels = (0..h.num_nodes()).map(|_| r.gen_range(0..k)).collect();
    PartitionAssignment::new(h, labels, k).unwrap()
}

/// Random disjoint pairs, ignoring edges and weights.
pub fn random_matching(n: usize, seed: u64) -> Matching {
    let mut r = rng(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut r);
    let take = r.gen_range(0..=n / 2);
    let pairs: Vec<(usize, usize)> = order
        .chunks_exact(2)
        .take(take)
        .map(|c| (c[0], c[1]))
        .collect();
    Matching::from_pairs(n, &pairs).unwrap()
}

pub fn random_embedding(n: usize, dims: usize, seed: u64) -> EmbeddingTable {
    let mut r = rng(seed);
    let data = (0..n * dims).map(|_| r.gen_range(-1.0..1.0)).collect();
    EmbeddingTable::new(dims, data).unwrap()
}
