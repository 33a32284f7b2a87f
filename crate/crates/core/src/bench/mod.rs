//! Seeded trial batches and improvement statistics.

mod mixture;
mod report;

pub use mixture::{generate_mixture, ComponentSpec, Mixture, MixtureSpec};
pub use report::{
    emit_report, parse_trial_csv, write_improvement_json, write_trial_csv, Comparison,
    GraphImprovement, GroupImprovement, ImprovementReport, MacroSummaries, MacroSummary,
    SummaryValues,
};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Weight};
use crate::partition::Objective;
use crate::partitioner::{partition, VCycleConfig};
use crate::seed::derive_seed;

pub const DEFAULT_TRIALS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub graph: String,
    pub config: String,
    pub seed: u64,
    pub objective: Objective,
    pub k: usize,
    pub objective_value: Weight,
    pub feasible: bool,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialPlan {
    pub graph: String,
    pub config: String,
    pub trials: usize,
    pub master_seed: u64,
    /// Worker threads; 0 uses the global pool.
    pub jobs: usize,
    /// When false, `runtime_ms` is written as 0 so batches compare byte for byte.
    pub record_runtime: bool,
}

impl TrialPlan {
    pub fn new(graph: impl Into<String>, config: impl Into<String>, master_seed: u64) -> Self {
        TrialPlan {
            graph: graph.into(),
            config: config.into(),
            trials: DEFAULT_TRIALS,
            master_seed,
            jobs: 0,
            record_runtime: true,
        }
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        derive_seed(self.master_seed, trial as u64)
    }
}

/// Runs `plan.trials` partition calls, trial `i` seeded with
/// `plan.trial_seed(i)`. Infeasible outcomes are kept and flagged.
pub fn run_trials(
    h: &Hypergraph,
    eps: Option<&EmbeddingTable>,
    cfg: &VCycleConfig,
    plan: &TrialPlan,
) -> Result<Vec<TrialRecord>> {
    if plan.trials == 0 {
        return Err(Error::Config("trial count must be at least 1".into()));
    }
    let one = |i: usize| -> Result<TrialRecord> {
        let seed = plan.trial_seed(i);
        let mut c = cfg.clone();
        c.seed = seed;
        let start = Instant::now();
        let r = partition(h, eps, &c)?;
        let runtime_ms = if plan.record_runtime {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        Ok(TrialRecord {
            graph: plan.graph.clone(),
            config: plan.config.clone(),
            seed,
            objective: cfg.objective,
            k: cfg.k,
            objective_value: r.objective_value,
            feasible: r.feasible,
            runtime_ms,
        })
    };
    let run = || {
        (0..plan.trials)
            .into_par_iter()
            .map(one)
            .collect::<Result<Vec<_>>>()
    };
    if plan.jobs == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(plan.jobs)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?
            .install(run)
    }
}

/// Orders records by graph, config, objective, k and seed.
pub fn sort_records(records: &mut [TrialRecord]) {
    records.sort_by(|a, b| {
        (&a.graph, &a.config, a.objective.as_str(), a.k, a.seed).cmp(&(
            &b.graph,
            &b.config,
            b.objective.as_str(),
            b.k,
            b.seed,
        ))
    });
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Summary {
    Mean,
    Min,
    Max,
    Std,
}

impl Summary {
    pub const ALL: [Summary; 4] = [Summary::Mean, Summary::Min, Summary::Max, Summary::Std];

    pub fn as_str(self) -> &'static str {
        match self {
            Summary::Mean => "mean",
            Summary::Min => "min",
            Summary::Max => "max",
            Summary::Std => "std",
        }
    }

    /// Applies the summary; `Std` is the population standard deviation.
    pub fn apply(self, xs: &[f64]) -> f64 {
        let n = xs.len() as f64;
        match self {
            Summary::Mean => xs.iter().sum::<f64>() / n,
            Summary::Min => xs.iter().copied().fold(f64::INFINITY, f64::min),
            Summary::Max => xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Summary::Std => {
                let mean = xs.iter().sum::<f64>() / n;
                (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
            }
        }
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Summary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Summary::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown summary {s:?}")))
    }
}

/// `G(baseline) / G(method)`. A zero method summary gives `+∞` against a
/// positive baseline and 1 against a zero baseline.
pub fn improvement(method: &[f64], baseline: &[f64], g: Summary) -> Result<f64> {
    if method.is_empty() || baseline.is_empty() {
        return Err(Error::Config(
            "improvement needs nonempty trial lists".into(),
        ));
    }
    let num = g.apply(baseline);
    let den = g.apply(method);
    Ok(if den == 0.0 {
        if num == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    })
}

/// Mean of the finite values and the number of infinite ones left out.
/// With no finite values the mean is `+∞`.
pub fn macro_improvement(per_graph: &[f64]) -> Result<(f64, usize)> {
    if per_graph.is_empty() {
        return Err(Error::Config("macro improvement of an empty list".into()));
    }
    let mut sum = 0.0;
    let mut finite = 0usize;
    for &x in per_graph {
        if x.is_finite() {
            sum += x;
            finite += 1;
        }
    }
    let excluded = per_graph.len() - finite;
    if finite == 0 {
        return Ok((f64::INFINITY, excluded));
    }
    Ok((sum / finite as f64, excluded))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn improvement_examples() {
        assert_eq!(
            improvement(&[5.0, 5.0], &[10.0, 10.0], Summary::Mean).unwrap(),
            2.0
        );
        let xs = [3.0, 7.0, 4.0];
        for g in [Summary::Mean, Summary::Min, Summary::Max] {
            assert_eq!(improvement(&xs, &xs, g).unwrap(), 1.0);
        }
        assert_eq!(
            improvement(&[10.0, 10.0], &[9.0, 11.0], Summary::Std).unwrap(),
            f64::INFINITY
        );
        assert_eq!(improvement(&[0.0], &[0.0], Summary::Mean).unwrap(), 1.0);
        assert!(improvement(&[], &[1.0], Summary::Mean).is_err());
    }

    #[test]
    fn macro_examples() {
        assert_eq!(macro_improvement(&[1.0, 1.0, 1.0]).unwrap(), (1.0, 0));
        assert_eq!(macro_improvement(&[2.0, 1.0]).unwrap(), (1.5, 0));
        assert_eq!(macro_improvement(&[2.0, f64::INFINITY]).unwrap(), (2.0, 1));
        assert!(macro_improvement(&[]).is_err());
    }

    #[test]
    fn population_std() {
        assert_eq!(Summary::Std.apply(&[9.0, 11.0]), 1.0);
        assert_eq!(Summary::Std.apply(&[4.0]), 0.0);
    }

    #[test]
    fn trials_are_reproducible() {
        let h = Hypergraph::unweighted(
            8,
            vec![
                vec![0, 1, 2],
                vec![2, 3],
                vec![3, 4, 5],
                vec![5, 6, 7],
                vec![7, 0],
            ],
        )
        .unwrap();
        let cfg = VCycleConfig::new(2, Objective::Connectivity);
        let mut plan = TrialPlan::new("g", "he", 9);
        plan.trials = 4;
        plan.record_runtime = false;
        let a = run_trials(&h, None, &cfg, &plan).unwrap();
        plan.jobs = 2;
        let b = run_trials(&h, None, &cfg, &plan).unwrap();
        assert_eq!(a, b);

        plan.trials = 1;
        let single = run_trials(&h, None, &cfg, &plan).unwrap();
        let mut direct = cfg.clone();
        direct.seed = plan.trial_seed(0);
        let r = partition(&h, None, &direct).unwrap();
        assert_eq!(single[0].objective_value, r.objective_value);
        plan.trials = 0;
        assert!(run_trials(&h, None, &cfg, &plan).is_err());
    }
}
