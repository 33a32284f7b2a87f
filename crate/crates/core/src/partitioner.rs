//! The multilevel V-cycle and recursive bisection drivers.

use std::time::Instant;

use serde::Serialize;

use crate::coarsening::{coarsen, CoarseningConfig, CoarseningMode, Scorer};
use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, NodeId, Weight};
use crate::initial::{best_initial, InitialConfig};
use crate::partition::{check_balance, is_feasible, Objective, PartId, PartitionAssignment};
use crate::refinement::{fm_refine, project, rebalance, FmConfig};
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionMode {
    DirectKway,
    RecursiveBisection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VCycleConfig {
    pub k: usize,
    pub objective: Objective,
    /// Imbalance tolerance α.
    pub alpha: f64,
    pub coarsening: CoarseningConfig,
    pub initial: InitialConfig,
    pub refinement: FmConfig,
    pub seed: u64,
    pub mode: PartitionMode,
}

impl VCycleConfig {
    pub fn new(k: usize, objective: Objective) -> Self {
        VCycleConfig {
            k,
            objective,
            alpha: 0.03,
            coarsening: CoarseningConfig::default(),
            initial: InitialConfig::default(),
            refinement: FmConfig::default(),
            seed: 0,
            mode: PartitionMode::DirectKway,
        }
    }

    fn validate(&self, h: &Hypergraph, eps: Option<&EmbeddingTable>) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Config(format!(
                "k must be at least 2, got {}",
                self.k
            )));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!(
                "imbalance must be >= 0, got {}",
                self.alpha
            )));
        }
        if self.k > h.num_nodes() {
            return Err(Error::Config(format!(
                "k = {} exceeds the node count {}",
                self.k,
                h.num_nodes()
            )));
        }
        if self.coarsening.scorer == Scorer::Embedding {
            let eps = eps.ok_or_else(|| {
                Error::Config("the embedding coarsener requires an embedding".into())
            })?;
            if eps.len() != h.num_nodes() {
                return Err(Error::InvalidEmbedding(format!(
                    "embedding has {} rows for {} nodes",
                    eps.len(),
                    h.num_nodes()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PhaseTimings {
    pub coarsening_ms: f64,
    pub initial_ms: f64,
    pub refinement_ms: f64,
    pub total_ms: f64,
}

impl PhaseTimings {
    fn add(&mut self, other: &PhaseTimings) {
        self.coarsening_ms += other.coarsening_ms;
        self.initial_ms += other.initial_ms;
        self.refinement_ms += other.refinement_ms;
        self.total_ms += other.total_ms;
    }
}

/// Objective at one level of the uncoarsening phase, coarsest first.
/// `projected_objective` is taken after any rebalancing, right before FM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelTrace {
    pub nodes: usize,
    pub projected_objective: Weight,
    pub refined_objective: Weight,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub k: usize,
    pub objective: Objective,
    pub imbalance: f64,
    pub mode: PartitionMode,
    pub coarsener: &'static str,
    pub coarsening_mode: &'static str,
    pub weight_tolerance: Option<Weight>,
    pub stop_node_count: Option<usize>,
    pub initial_attempts: usize,
    pub refinement_passes: usize,
    pub seed: u64,
}

impl From<&VCycleConfig> for ConfigEcho {
    fn from(c: &VCycleConfig) -> Self {
        ConfigEcho {
            k: c.k,
            objective: c.objective,
            imbalance: c.alpha,
            mode: c.mode,
            coarsener: match c.coarsening.scorer {
                Scorer::HeavyEdge => "heavy-edge",
                Scorer::Embedding => "embedding",
            },
            coarsening_mode: match c.coarsening.mode {
                CoarseningMode::LogN => "logn",
                CoarseningMode::NLevel => "nlevel",
            },
            weight_tolerance: c.coarsening.weight_tolerance,
            stop_node_count: c.coarsening.stop_node_count,
            initial_attempts: c.initial.attempts,
            refinement_passes: c.refinement.max_passes,
            seed: c.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport {
    pub assignment: PartitionAssignment,
    pub objective_value: Weight,
    pub imbalance: f64,
    pub feasible: bool,
    /// Coarse levels built (deepest bisection branch in recursive mode).
    pub levels: usize,
    pub trace: Vec<LevelTrace>,
    pub timings: PhaseTimings,
    pub config: ConfigEcho,
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    config: &'a ConfigEcho,
    objective: Objective,
    objective_value: Weight,
    imbalance: f64,
    feasible: bool,
    levels: usize,
    part_weights: &'a [Weight],
    trace: &'a [LevelTrace],
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<&'a PhaseTimings>,
    assignment: &'a [PartId],
}

impl PartitionReport {
    /// Pretty JSON with a fixed key order and a trailing newline. Without
    /// timings the document depends only on the inputs and the seed.
    pub fn to_json(&self, with_timings: bool) -> String {
        let doc = ReportDocument {
            config: &self.config,
            objective: self.config.objective,
            objective_value: self.objective_value,
            imbalance: self.imbalance,
            feasible: self.feasible,
            levels: self.levels,
            part_weights: self.assignment.part_weights(),
            trace: &self.trace,
            timings: with_timings.then_some(&self.timings),
            assignment: self.assignment.labels(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

fn millis(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

struct CycleOutcome {
    assignment: PartitionAssignment,
    levels: usize,
    trace: Vec<LevelTrace>,
    timings: PhaseTimings,
}

fn v_cycle(
    h: &Hypergraph,
    eps: Option<&EmbeddingTable>,
    k: usize,
    alpha: f64,
    cfg: &VCycleConfig,
    seed: u64,
) -> Result<CycleOutcome> {
    let start = Instant::now();
    let mut timings = PhaseTimings::default();

    let t = Instant::now();
    let hierarchy = coarsen(h, eps, &cfg.coarsening, k, derive_seed(seed, 1))?;
    timings.coarsening_ms = millis(t);

    let t = Instant::now();
    let coarsest = hierarchy.coarsest(h);
    let mut p = match best_initial(
        coarsest,
        k,
        alpha,
        cfg.objective,
        &cfg.initial,
        derive_seed(seed, 2),
    ) {
        Ok(p) => p,
        Err(Error::Infeasible {
            least_imbalanced, ..
        }) => *least_imbalanced,
        Err(e) => return Err(e),
    };
    timings.initial_ms = millis(t);

    let t = Instant::now();
    let mut trace = Vec::with_capacity(hierarchy.depth() + 1);
    if !check_balance(coarsest, &p, alpha) {
        rebalance(coarsest, &mut p, alpha, cfg.objective);
    }
    let projected = cfg.objective.evaluate(coarsest, &p);
    let stats = fm_refine(coarsest, &mut p, alpha, cfg.objective, &cfg.refinement);
    trace.push(LevelTrace {
        nodes: coarsest.num_nodes(),
        projected_objective: projected,
        refined_objective: stats.final_objective,
    });
    for i in (0..hierarchy.depth()).rev() {
        let fine = if i == 0 {
            h
        } else {
            &hierarchy.levels[i - 1].hypergraph
        };
        p = project(&p, &hierarchy.levels[i].map, fine);
        if !check_balance(fine, &p, alpha) {
            rebalance(fine, &mut p, alpha, cfg.objective);
        }
        let projected = cfg.objective.evaluate(fine, &p);
        let stats = fm_refine(fine, &mut p, alpha, cfg.objective, &cfg.refinement);
        trace.push(LevelTrace {
            nodes: fine.num_nodes(),
            projected_objective: projected,
            refined_objective: stats.final_objective,
        });
    }
    timings.refinement_ms = millis(t);
    timings.total_ms = millis(start);
    Ok(CycleOutcome {
        assignment: p,
        levels: hierarchy.depth(),
        trace,
        timings,
    })
}

fn finish(h: &Hypergraph, cfg: &VCycleConfig, outcome: CycleOutcome) -> PartitionReport {
    let objective_value = cfg.objective.evaluate(h, &outcome.assignment);
    PartitionReport {
        imbalance: outcome.assignment.imbalance(),
        feasible: is_feasible(h, &outcome.assignment, cfg.alpha),
        objective_value,
        assignment: outcome.assignment,
        levels: outcome.levels,
        trace: outcome.trace,
        timings: outcome.timings,
        config: ConfigEcho::from(cfg),
    }
}

/// Coarsen, solve the coarsest level, then project and refine level by
/// level. Dispatches to [`recursive_bisect`] when `cfg.mode` asks for it.
pub fn partition(
    h: &Hypergraph,
    eps: Option<&EmbeddingTable>,
    cfg: &VCycleConfig,
) -> Result<PartitionReport> {
    cfg.validate(h, eps)?;
    if cfg.mode == PartitionMode::RecursiveBisection {
        return recursive_bisect(h, eps, cfg);
    }
    let outcome = v_cycle(h, eps, cfg.k, cfg.alpha, cfg, cfg.seed)?;
    Ok(finish(h, cfg, outcome))
}

/// Recursive bisection for `k = 2^m`.
///
/// Each bisection runs a full V-cycle with `k = 2` and the per-level
/// tolerance `(1+α)^{1/m} − 1`. Each side becomes a sub-hypergraph with dense
/// 0-based ids (ascending original id) and a matching slice of the embedding.
/// Under the cut objective, edges cut at a level are dropped from deeper
/// levels; under connectivity they are split and each side keeps its
/// restriction, so deeper cuts are charged again.
pub fn recursive_bisect(
    h: &Hypergraph,
    eps: Option<&EmbeddingTable>,
    cfg: &VCycleConfig,
) -> Result<PartitionReport> {
    cfg.validate(h, eps)?;
    if !cfg.k.is_power_of_two() {
        return Err(Error::Config(format!(
            "recursive bisection needs a power-of-two k, got {}",
            cfg.k
        )));
    }
    let depth = cfg.k.trailing_zeros();
    let level_alpha = if depth == 1 {
        cfg.alpha
    } else {
        (1.0 + cfg.alpha).powf(1.0 / depth as f64) - 1.0
    };
    let start = Instant::now();
    let mut labels = vec![0; h.num_nodes()];
    let mut timings = PhaseTimings::default();
    let mut levels = 0;
    let ids: Vec<NodeId> = (0..h.num_nodes()).collect();
    bisect_into(
        h,
        eps,
        &ids,
        cfg.k,
        0,
        1,
        level_alpha,
        cfg,
        &mut labels,
        &mut timings,
        &mut levels,
    )?;
    timings.total_ms = millis(start);
    let assignment = PartitionAssignment::new(h, labels, cfg.k)?;
    Ok(finish(
        h,
        cfg,
        CycleOutcome {
            assignment,
            levels,
            trace: Vec::new(),
            timings,
        },
    ))
}

#[allow(clippy::too_many_arguments)]
fn bisect_into(
    h: &Hypergraph,
    eps: Option<&EmbeddingTable>,
    original_ids: &[NodeId],
    k: usize,
    base: PartId,
    call: u64,
    alpha: f64,
    cfg: &VCycleConfig,
    labels: &mut [PartId],
    timings: &mut PhaseTimings,
    levels: &mut usize,
) -> Result<()> {
    if k == 1 || h.num_nodes() < 2 {
        for &v in original_ids {
            labels[v] = base;
        }
        return Ok(());
    }
    // The root bisection uses the caller's seed so k = 2 matches direct mode.
    let seed = if call == 1 {
        cfg.seed
    } else {
        derive_seed(cfg.seed, call)
    };
    let outcome = v_cycle(h, eps, 2, alpha, cfg, seed)?;
    timings.add(&outcome.timings);
    *levels = (*levels).max(outcome.levels);
    let drop_split = cfg.objective == Objective::Cut;
    for side in 0..2 {
        let local: Vec<NodeId> = (0..h.num_nodes())
            .filter(|&v| outcome.assignment.label(v) == side)
            .collect();
        let sub = h.induced(&local, drop_split);
        let sub_eps = eps.map(|t| t.select(&local));
        let sub_ids: Vec<NodeId> = local.iter().map(|&v| original_ids[v]).collect();
        bisect_into(
            &sub,
            sub_eps.as_ref(),
            &sub_ids,
            k / 2,
            base + side * (k / 2),
            2 * call + side as u64,
            alpha,
            cfg,
            labels,
            timings,
            levels,
        )?;
    }
    Ok(())
}
