//! CSV trial tables and JSON improvement reports.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use super::{improvement, macro_improvement, sort_records, Summary, TrialRecord};
use crate::error::{Error, Result};
use crate::partition::Objective;

const CSV_HEADER: [&str; 8] = [
    "graph",
    "config",
    "seed",
    "objective",
    "k",
    "objective_value",
    "feasible",
    "runtime_ms",
];

/// 17 significant digits; infinities become the strings "+inf" / "-inf".
fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x > 0.0 {
        "\"+inf\"".to_string()
    } else if x < 0.0 {
        "\"-inf\"".to_string()
    } else {
        "\"nan\"".to_string()
    }
}

fn ser_float<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(format_float(*x)).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Comparison {
    pub method: String,
    pub baseline: String,
}

impl Comparison {
    pub fn new(method: impl Into<String>, baseline: impl Into<String>) -> Self {
        Comparison {
            method: method.into(),
            baseline: baseline.into(),
        }
    }

    fn key(&self) -> String {
        format!("{} vs {}", self.method, self.baseline)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryValues {
    #[serde(serialize_with = "ser_float")]
    pub mean: f64,
    #[serde(serialize_with = "ser_float")]
    pub min: f64,
    #[serde(serialize_with = "ser_float")]
    pub max: f64,
    #[serde(serialize_with = "ser_float")]
    pub std: f64,
}

impl SummaryValues {
    pub fn get(&self, g: Summary) -> f64 {
        match g {
            Summary::Mean => self.mean,
            Summary::Min => self.min,
            Summary::Max => self.max,
            Summary::Std => self.std,
        }
    }

    fn try_build(mut f: impl FnMut(Summary) -> Result<f64>) -> Result<Self> {
        Ok(SummaryValues {
            mean: f(Summary::Mean)?,
            min: f(Summary::Min)?,
            max: f(Summary::Max)?,
            std: f(Summary::Std)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MacroSummary {
    #[serde(serialize_with = "ser_float")]
    pub value: f64,
    /// Graphs whose improvement was infinite and so left out of `value`.
    pub excluded: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MacroSummaries {
    pub mean: MacroSummary,
    pub min: MacroSummary,
    pub max: MacroSummary,
    pub std: MacroSummary,
}

impl MacroSummaries {
    pub fn get(&self, g: Summary) -> MacroSummary {
        match g {
            Summary::Mean => self.mean,
            Summary::Min => self.min,
            Summary::Max => self.max,
            Summary::Std => self.std,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphImprovement {
    pub graph: String,
    pub method_trials: usize,
    pub baseline_trials: usize,
    pub improvement: SummaryValues,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupImprovement {
    pub objective: Objective,
    pub k: usize,
    pub graphs: Vec<GraphImprovement>,
    #[serde(rename = "macro")]
    pub macro_summary: MacroSummaries,
}

impl GroupImprovement {
    pub fn macro_value(&self, g: Summary) -> MacroSummary {
        self.macro_summary.get(g)
    }
}

/// Improvements keyed by `"<method> vs <baseline>"`, then grouped by
/// objective and k. Graphs missing either configuration are skipped.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ImprovementReport {
    pub improvements: BTreeMap<String, Vec<GroupImprovement>>,
}

type GroupKey<'a> = (&'static str, usize, &'a str);

impl ImprovementReport {
    pub fn compute(records: &[TrialRecord], comparisons: &[Comparison]) -> Result<Self> {
        // (objective, k, graph) -> config -> objective values
        let mut table: BTreeMap<GroupKey<'_>, BTreeMap<&str, Vec<f64>>> = BTreeMap::new();
        let mut objectives: BTreeMap<&'static str, Objective> = BTreeMap::new();
        for r in records {
            objectives.insert(r.objective.as_str(), r.objective);
            table
                .entry((r.objective.as_str(), r.k, r.graph.as_str()))
                .or_default()
                .entry(r.config.as_str())
                .or_default()
                .push(r.objective_value as f64);
        }
        let mut report = ImprovementReport::default();
        for c in comparisons {
            let mut groups: BTreeMap<(&str, usize), Vec<GraphImprovement>> = BTreeMap::new();
            for (&(obj, k, graph), by_config) in &table {
                let (Some(m), Some(b)) = (
                    by_config.get(c.method.as_str()),
                    by_config.get(c.baseline.as_str()),
                ) else {
                    continue;
                };
                groups.entry((obj, k)).or_default().push(GraphImprovement {
                    graph: graph.to_string(),
                    method_trials: m.len(),
                    baseline_trials: b.len(),
                    improvement: SummaryValues::try_build(|g| improvement(m, b, g))?,
                });
            }
            let mut out = Vec::new();
            for ((obj, k), graphs) in groups {
                let summarize = |g: Summary| -> Result<MacroSummary> {
                    let per: Vec<f64> = graphs.iter().map(|x| x.improvement.get(g)).collect();
                    let (value, excluded) = macro_improvement(&per)?;
                    Ok(MacroSummary { value, excluded })
                };
                let macro_summary = MacroSummaries {
                    mean: summarize(Summary::Mean)?,
                    min: summarize(Summary::Min)?,
                    max: summarize(Summary::Max)?,
                    std: summarize(Summary::Std)?,
                };
                out.push(GroupImprovement {
                    objective: objectives[obj],
                    k,
                    graphs,
                    macro_summary,
                });
            }
            report.improvements.insert(c.key(), out);
        }
        Ok(report)
    }
}

/// One row per record in canonical order, header first.
pub fn write_trial_csv(records: &[TrialRecord]) -> Result<String> {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in &sorted {
        w.write_record([
            r.graph.clone(),
            r.config.clone(),
            r.seed.to_string(),
            r.objective.as_str().to_string(),
            r.k.to_string(),
            r.objective_value.to_string(),
            r.feasible.to_string(),
            format_float(r.runtime_ms),
        ])?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Config(format!("csv flush failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_trial_csv(text: &str) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Config(format!(
            "unexpected trial csv header {header:?}"
        )));
    }
    let mut out = Vec::new();
    for rec in r.deserialize() {
        let rec: TrialRecord = rec?;
        if rec.objective_value < 0 {
            return Err(Error::Config(
                "negative objective value in trial csv".into(),
            ));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn write_improvement_json(report: &ImprovementReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// The CSV trial table and the JSON improvement report.
pub fn emit_report(
    records: &[TrialRecord],
    comparisons: &[Comparison],
) -> Result<(String, String)> {
    let csv = write_trial_csv(records)?;
    let json = write_improvement_json(&ImprovementReport::compute(records, comparisons)?)?;
    Ok((csv, json))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(graph: &str, config: &str, seed: u64, value: i64) -> TrialRecord {
        TrialRecord {
            graph: graph.into(),
            config: config.into(),
            seed,
            objective: Objective::Connectivity,
            k: 2,
            objective_value: value,
            feasible: true,
            runtime_ms: 0.25,
        }
    }

    fn sample() -> Vec<TrialRecord> {
        vec![
            rec("a", "emb", 1, 5),
            rec("a", "emb", 2, 5),
            rec("a", "he", 1, 10),
            rec("a", "he", 2, 10),
            rec("b", "emb", 1, 9),
            rec("b", "emb", 2, 11),
            rec("b", "he", 1, 10),
            rec("b", "he", 2, 10),
        ]
    }

    #[test]
    fn zero_comparisons() {
        let (csv, json) = emit_report(&sample(), &[]).unwrap();
        assert_eq!(csv.lines().count(), 9);
        assert!(
            csv.starts_with("graph,config,seed,objective,k,objective_value,feasible,runtime_ms\n")
        );
        assert_eq!(json, "{\n  \"improvements\": {}\n}\n");
    }

    #[test]
    fn csv_round_trip() {
        let records = sample();
        let csv = write_trial_csv(&records).unwrap();
        let mut sorted = records.clone();
        sort_records(&mut sorted);
        assert_eq!(parse_trial_csv(&csv).unwrap(), sorted);
    }

    #[test]
    fn improvements_and_sentinels() {
        let r = ImprovementReport::compute(&sample(), &[Comparison::new("emb", "he")]).unwrap();
        let group = &r.improvements["emb vs he"][0];
        assert_eq!(group.graphs.len(), 2);
        assert_eq!(group.graphs[0].improvement.mean, 2.0);
        assert_eq!(group.graphs[1].improvement.mean, 1.0);
        // b: method std 1, baseline std 0 -> 0; a: 0/0 -> 1
        assert_eq!(group.macro_value(Summary::Std).value, 0.5);
        assert_eq!(group.macro_value(Summary::Mean).value, 1.5);

        let r = ImprovementReport::compute(&sample(), &[Comparison::new("he", "emb")]).unwrap();
        let group = &r.improvements["he vs emb"][0];
        assert_eq!(group.graphs[1].improvement.std, f64::INFINITY);
        assert_eq!(group.macro_value(Summary::Std).excluded, 1);
        let json = write_improvement_json(&r).unwrap();
        assert!(json.contains("\"+inf\""));
        assert!(json.contains("5.0000000000000000e-1"));
    }

    #[test]
    fn float_format() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(2.0), "2.0000000000000000e0");
        assert_eq!("1.0000000000000001e-1".parse::<f64>().unwrap(), 0.1);
    }
}
