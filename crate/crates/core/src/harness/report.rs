use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::experiment::ExperimentConfig;
use crate::attack::{AttackResult, FailureReason};
use crate::error::Result;
use crate::oracle::QueryCounts;
use crate::partition::SearchPhase;

/// Outcome of one attack on one target graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    /// Index of the graph in its dataset.
    pub id: usize,
    pub trial: usize,
    pub success: bool,
    pub flips_added: usize,
    pub flips_removed: usize,
    pub rate: f64,
    pub queries: QueryCounts,
    pub time_s: f64,
    pub found_in: Option<SearchPhase>,
    pub failure: Option<FailureReason>,
    #[serde(default)]
    pub cgs_flips: Option<usize>,
    #[serde(default)]
    pub iterations: usize,
    #[serde(skip)]
    pub gradient_norm_trace: Vec<f64>,
    #[serde(skip)]
    pub p_trace: Vec<f64>,
}

impl GraphRecord {
    pub fn from_result(id: usize, trial: usize, r: &AttackResult) -> Self {
        Self {
            id,
            trial,
            success: r.success,
            flips_added: r.flips.added.len(),
            flips_removed: r.flips.removed.len(),
            rate: r.rate,
            queries: r.queries,
            time_s: r.wall_time,
            found_in: r.found_in,
            failure: r.failure,
            cgs_flips: r.cgs_flips,
            iterations: r.iterations_run,
            gradient_norm_trace: r.gradient_norm_trace.clone(),
            p_trace: r.p_trace.clone(),
        }
    }

    pub fn flips(&self) -> usize {
        self.flips_added + self.flips_removed
    }
}

/// SR, AP, AQ and AT. AP and the added/removed averages are taken over
/// successful attacks only and are absent when there are none; AQ and AT
/// include failures.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Aggregates {
    #[serde(rename = "SR")]
    pub sr: f64,
    #[serde(rename = "AP")]
    pub ap: Option<f64>,
    #[serde(rename = "AQ")]
    pub aq: f64,
    #[serde(rename = "AT")]
    pub at: f64,
    pub avg_added: Option<f64>,
    pub avg_removed: Option<f64>,
    pub targets: usize,
    pub successes: usize,
}

pub fn aggregate(rows: &[GraphRecord]) -> Aggregates {
    let n = rows.len();
    if n == 0 {
        return Aggregates::default();
    }
    let wins: Vec<&GraphRecord> = rows.iter().filter(|r| r.success).collect();
    let over_wins = |f: &dyn Fn(&GraphRecord) -> usize| {
        (!wins.is_empty())
            .then(|| wins.iter().map(|r| f(r) as f64).sum::<f64>() / wins.len() as f64)
    };
    Aggregates {
        sr: wins.len() as f64 / n as f64,
        ap: over_wins(&|r| r.flips()),
        aq: rows.iter().map(|r| r.queries.total as f64).sum::<f64>() / n as f64,
        at: rows.iter().map(|r| r.time_s).sum::<f64>() / n as f64,
        avg_added: over_wins(&|r| r.flips_added),
        avg_removed: over_wins(&|r| r.flips_removed),
        targets: n,
        successes: wins.len(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub per_graph: Vec<GraphRecord>,
    pub aggregates: Aggregates,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    id: usize,
    trial: usize,
    success: bool,
    flips_added: usize,
    flips_removed: usize,
    rate: f64,
    queries_total: u64,
    queries_cgs: u64,
    queries_binary_search: u64,
    queries_qegc: u64,
    queries_other: u64,
    found_in: String,
    failure: &'a str,
    time_s: f64,
}

fn failure_name(f: Option<FailureReason>) -> &'static str {
    match f {
        None => "",
        Some(FailureReason::NoAdversarialFound) => "no_adversarial_found",
        Some(FailureReason::NoBoundary) => "no_boundary",
        Some(FailureReason::BudgetExhausted) => "budget_exhausted",
        Some(FailureReason::OverBudget) => "over_budget",
        Some(FailureReason::VerificationFailed) => "verification_failed",
    }
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig, per_graph: Vec<GraphRecord>) -> Self {
        let aggregates = aggregate(&per_graph);
        Self {
            config,
            per_graph,
            aggregates,
        }
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, self)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// One row per target and trial. Every column except `time_s` is a
    /// deterministic function of the config.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.per_graph {
            w.serialize(CsvRow {
                id: r.id,
                trial: r.trial,
                success: r.success,
                flips_added: r.flips_added,
                flips_removed: r.flips_removed,
                rate: r.rate,
                queries_total: r.queries.total,
                queries_cgs: r.queries.cgs,
                queries_binary_search: r.queries.binary_search,
                queries_qegc: r.queries.qegc,
                queries_other: r.queries.other,
                found_in: r.found_in.map(|p| p.to_string()).unwrap_or_default(),
                failure: failure_name(r.failure),
                time_s: r.time_s,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `graph_<id>_trial_<t>.csv` with the per-iteration gradient norm
    /// and objective for every record (header only when no iteration ran).
    pub fn write_traces(&self, dir: impl AsRef<Path>) -> Result<Vec<std::path::PathBuf>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for r in &self.per_graph {
            let path = dir.join(format!("graph_{}_trial_{}.csv", r.id, r.trial));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["iteration", "grad_norm", "p"])?;
            for (t, g) in r.gradient_norm_trace.iter().enumerate() {
                let p = r.p_trace.get(t).copied().unwrap_or(f64::NAN);
                w.write_record([t.to_string(), g.to_string(), p.to_string()])?;
            }
            w.flush()?;
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(success: bool, added: usize, removed: usize, queries: u64, time_s: f64) -> GraphRecord {
        GraphRecord {
            id: 0,
            trial: 0,
            success,
            flips_added: added,
            flips_removed: removed,
            rate: 0.0,
            queries: QueryCounts {
                total: queries,
                ..Default::default()
            },
            time_s,
            found_in: None,
            failure: None,
            cgs_flips: None,
            iterations: 0,
            gradient_norm_trace: Vec::new(),
            p_trace: Vec::new(),
        }
    }

    #[test]
    fn failures_count_for_queries_and_time_only() {
        let rows = [
            rec(true, 2, 1, 100, 1.0),
            rec(true, 1, 0, 300, 2.0),
            rec(false, 0, 0, 800, 6.0),
        ];
        let agg = aggregate(&rows);
        assert!((agg.sr - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(agg.ap, Some(2.0));
        assert_eq!(agg.aq, 400.0);
        assert_eq!(agg.at, 3.0);
        assert_eq!(agg.avg_added, Some(1.5));
        assert_eq!(agg.avg_removed, Some(0.5));
    }

    #[test]
    fn no_successes() {
        let agg = aggregate(&[rec(false, 0, 0, 10, 0.5)]);
        assert_eq!(agg.sr, 0.0);
        assert_eq!(agg.ap, None);
        let json = serde_json::to_value(agg).unwrap();
        assert!(json.get("SR").is_some() && json["AP"].is_null());
    }
}
