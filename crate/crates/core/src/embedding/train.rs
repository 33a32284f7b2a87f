//! Stochastic gradient descent for the pairwise embedding losses.
//!
//! For a pair with dot product `x = ε(u)·ε(v)` and target `S`:
//!
//! * FOBE, `S > 0`: `σ(x) · ln(S / σ(x))`.
//! * FOBE, `S = 0`: `(1 − σ(x)) · ln(1 / (1 − σ(x)))`, the same expression
//!   evaluated for the complementary event, since `ln 0` is undefined.
//! * HOBE: `(S − max(0, x))²`.
//!
//! `σ` is clamped to `[1e-12, 1 − 1e-12]` before any logarithm.

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::algebraic::{AlgebraicCoordinates, DEFAULT_ITERATIONS, DEFAULT_RESTARTS};
use super::samples::{fobe_samples, hobe_scores, SampleSet, DEFAULT_NEGATIVES_PER_POSITIVE};
use super::{dot, EmbeddingTable, DEFAULT_DIMS};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::seed::{derive_seed, rng, Rng};

const SIGMA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    Fobe,
    Hobe,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dims: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub negatives_per_positive: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dims: DEFAULT_DIMS,
            epochs: 20,
            learning_rate: 0.025,
            negatives_per_positive: DEFAULT_NEGATIVES_PER_POSITIVE,
            seed: 0,
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    (1.0 / (1.0 + (-x).exp())).clamp(SIGMA_FLOOR, 1.0 - SIGMA_FLOOR)
}

fn loss_value(loss: Loss, target: f64, x: f64) -> f64 {
    match loss {
        Loss::Fobe => {
            let s = sigmoid(x);
            if target > 0.0 {
                s * (target / s).ln()
            } else {
                let c = 1.0 - s;
                -c * c.ln()
            }
        }
        Loss::Hobe => (target - x.max(0.0)).powi(2),
    }
}

/// Derivative of the loss with respect to the dot product.
fn loss_slope(loss: Loss, target: f64, x: f64) -> f64 {
    match loss {
        Loss::Fobe => {
            let s = sigmoid(x);
            let ds = s * (1.0 - s);
            if target > 0.0 {
                (target.ln() - s.ln() - 1.0) * ds
            } else {
                ((1.0 - s).ln() + 1.0) * ds
            }
        }
        Loss::Hobe => {
            if x > 0.0 {
                -2.0 * (target - x)
            } else {
                0.0
            }
        }
    }
}

pub fn pair_loss(loss: Loss, target: f64, eu: &[f64], ev: &[f64]) -> f64 {
    loss_value(loss, target, dot(eu, ev))
}

/// Analytic gradient of [`pair_loss`] with respect to `eu` and `ev`.
pub fn pair_gradient(loss: Loss, target: f64, eu: &[f64], ev: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let g = loss_slope(loss, target, dot(eu, ev));
    (
        ev.iter().map(|x| g * x).collect(),
        eu.iter().map(|x| g * x).collect(),
    )
}

struct Trainer {
    loss: Loss,
    table: EmbeddingTable,
    rng: Rng,
    order: Vec<usize>,
}

impl Trainer {
    fn new(loss: Loss, num_vertices: usize, cfg: &TrainConfig) -> Result<Self> {
        if cfg.dims == 0 {
            return Err(Error::Config(
                "embedding dimension must be at least 1".into(),
            ));
        }
        let mut rng = rng(cfg.seed);
        let half = 0.5 / cfg.dims as f64;
        let data = (0..num_vertices * cfg.dims)
            .map(|_| rng.gen_range(-half..=half))
            .collect();
        Ok(Trainer {
            loss,
            table: EmbeddingTable::new(cfg.dims, data)?,
            rng,
            order: Vec::new(),
        })
    }

    fn epoch(&mut self, samples: &SampleSet, lr: f64) {
        self.order.clear();
        self.order.extend(0..samples.pairs.len());
        self.order.shuffle(&mut self.rng);
        let dims = self.table.dims();
        let mut old_u = vec![0.0; dims];
        let mut old_v = vec![0.0; dims];
        for &i in &self.order {
            let p = samples.pairs[i];
            if p.u == p.v {
                continue;
            }
            let x = self.table.dot(p.u, p.v);
            let g = loss_slope(self.loss, p.target, x);
            if g == 0.0 {
                continue;
            }
            old_u.copy_from_slice(self.table.vector(p.u));
            old_v.copy_from_slice(self.table.vector(p.v));
            let step = lr * g;
            for (a, b) in self.table.vector_mut(p.u).iter_mut().zip(&old_v) {
                *a -= step * b;
            }
            for (a, b) in self.table.vector_mut(p.v).iter_mut().zip(&old_u) {
                *a -= step * b;
            }
        }
    }
}

/// Linear decay to 1e-4 of the initial rate over the run.
fn learning_rate(cfg: &TrainConfig, epoch: usize) -> f64 {
    let frac = epoch as f64 / cfg.epochs.max(1) as f64;
    cfg.learning_rate * (1.0 - frac).max(1e-4)
}

fn train_fixed(loss: Loss, samples: &SampleSet, cfg: &TrainConfig) -> Result<EmbeddingTable> {
    if samples.is_empty() {
        return Err(Error::Config("cannot train on an empty sample set".into()));
    }
    let mut t = Trainer::new(loss, samples.num_vertices, cfg)?;
    for epoch in 0..cfg.epochs {
        t.epoch(samples, learning_rate(cfg, epoch));
    }
    Ok(t.table)
}

/// Fits the first-order loss over a fixed sample set.
pub fn fobe_train(samples: &SampleSet, cfg: &TrainConfig) -> Result<EmbeddingTable> {
    train_fixed(Loss::Fobe, samples, cfg)
}

/// Fits the squared hinge loss over a fixed sample set.
pub fn hobe_train(samples: &SampleSet, cfg: &TrainConfig) -> Result<EmbeddingTable> {
    train_fixed(Loss::Hobe, samples, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingMethod {
    Fobe,
    Hobe { restarts: usize, iterations: usize },
}

impl EmbeddingMethod {
    pub fn hobe() -> Self {
        EmbeddingMethod::Hobe {
            restarts: DEFAULT_RESTARTS,
            iterations: DEFAULT_ITERATIONS,
        }
    }
}

/// Trains on the star expansion of `h`, drawing a fresh sample set every
/// epoch, and returns the rows of the original nodes.
pub fn embed_hypergraph(
    h: &Hypergraph,
    method: EmbeddingMethod,
    cfg: &TrainConfig,
) -> Result<EmbeddingTable> {
    let g = h.star_expand();
    let loss = match method {
        EmbeddingMethod::Fobe => Loss::Fobe,
        EmbeddingMethod::Hobe { .. } => Loss::Hobe,
    };
    let coords = match method {
        EmbeddingMethod::Hobe {
            restarts,
            iterations,
        } => {
            if restarts == 0 {
                return Err(Error::Config(
                    "algebraic distance needs at least one restart".into(),
                ));
            }
            Some(AlgebraicCoordinates::compute(
                &g,
                restarts,
                iterations,
                derive_seed(cfg.seed, u64::MAX),
            ))
        }
        EmbeddingMethod::Fobe => None,
    };
    let mut trainer = Trainer::new(loss, g.num_vertices(), cfg)?;
    for epoch in 0..cfg.epochs {
        let seed = derive_seed(cfg.seed, epoch as u64);
        let samples = match &coords {
            Some(c) => hobe_scores(
                &g,
                |u, v| c.similarity(u, v),
                cfg.negatives_per_positive,
                seed,
            ),
            None => fobe_samples(&g, cfg.negatives_per_positive, seed),
        };
        trainer.epoch(&samples, learning_rate(cfg, epoch));
    }
    let nodes: Vec<usize> = (0..h.num_nodes()).collect();
    Ok(trainer.table.select(&nodes))
}
