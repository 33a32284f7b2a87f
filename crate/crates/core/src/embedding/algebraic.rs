//! Algebraic distance on a bipartite graph.
//!
//! Each restart draws coordinates uniformly from `[0, 1]` and applies `t`
//! Jacobi sweeps of
//!
//! ```text
//! a'(u) = ½ (a(u) + Σ_{v∈Γ(u)} a(v)/|Γ(v)| / Σ_{v∈Γ(u)} 1/|Γ(v)|)
//! ```
//!
//! Every update is a convex combination of current coordinates, so values
//! never leave the range of the initialization. Isolated vertices keep their
//! coordinate.

use rand::Rng as _;

use crate::hypergraph::BipartiteGraph;
use crate::seed::{derive_seed, rng};

pub const DEFAULT_RESTARTS: usize = 10;
pub const DEFAULT_ITERATIONS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicCoordinates {
    iterations: usize,
    /// `coords[r][x]`: coordinate of vertex `x` in restart `r`.
    coords: Vec<Vec<f64>>,
}

/// One sweep from `current` into `next`.
pub fn relaxation_step(g: &BipartiteGraph, current: &[f64], next: &mut [f64]) {
    for (x, slot) in next.iter_mut().enumerate() {
        let nbrs = g.neighbors(x);
        if nbrs.is_empty() {
            *slot = current[x];
            continue;
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for &y in nbrs {
            let inv = 1.0 / g.degree(y) as f64;
            num += current[y] * inv;
            den += inv;
        }
        *slot = 0.5 * (current[x] + num / den);
    }
}

impl AlgebraicCoordinates {
    pub fn compute(g: &BipartiteGraph, restarts: usize, iterations: usize, seed: u64) -> Self {
        Self::compute_observed(g, restarts, iterations, seed, |_, _, _| {})
    }

    /// Like [`compute`](Self::compute), calling `observe(restart, iteration, coords)`
    /// after initialization (iteration 0) and after every sweep.
    pub fn compute_observed(
        g: &BipartiteGraph,
        restarts: usize,
        iterations: usize,
        seed: u64,
        mut observe: impl FnMut(usize, usize, &[f64]),
    ) -> Self {
        let n = g.num_vertices();
        let mut coords = Vec::with_capacity(restarts);
        for r in 0..restarts {
            let mut rng = rng(derive_seed(seed, r as u64));
            let mut cur: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let mut next = vec![0.0; n];
            observe(r, 0, &cur);
            for i in 1..=iterations {
                relaxation_step(g, &cur, &mut next);
                std::mem::swap(&mut cur, &mut next);
                observe(r, i, &cur);
            }
            coords.push(cur);
        }
        AlgebraicCoordinates { iterations, coords }
    }

    /// Wraps precomputed coordinates, `coords[r][x]`.
    pub fn from_coordinates(coords: Vec<Vec<f64>>, iterations: usize) -> Self {
        AlgebraicCoordinates { iterations, coords }
    }

    pub fn restarts(&self) -> usize {
        self.coords.len()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn coordinate(&self, restart: usize, x: usize) -> f64 {
        self.coords[restart][x]
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        self.coords
            .iter()
            .map(|c| (c[u] - c[v]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `(√R − d(u, v)) / √R`.
    pub fn similarity(&self, u: usize, v: usize) -> f64 {
        let root = (self.restarts() as f64).sqrt();
        (root - self.distance(u, v)) / root
    }
}
