use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::baseline::random_attack;
use super::dataset::{load_tudataset, DatasetBundle};
use super::report::{aggregate, Aggregates, ExperimentReport, GraphRecord};
use super::synthetic::{generate_synthetic, SyntheticKind};
use crate::attack::{attack, AttackConfig};
use crate::defense::{Defended, LowRankConfig};
use crate::error::{Error, Result};
use crate::graph::{Graph, Label};
use crate::oracle::{Classifier, GinWeights, HardLabelOracle, StructuralFeature, StructuralOracle};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source")]
pub enum DatasetSpec {
    TuDataset {
        dir: PathBuf,
        name: String,
    },
    /// Generated graphs, labelled by `labeler` or else by the (undefended)
    /// target model.
    Synthetic {
        generator: SyntheticKind,
        count: usize,
        seed: u64,
        #[serde(default)]
        labeler: Option<Box<OracleSpec>>,
    },
}

impl DatasetSpec {
    pub fn load(&self, labeler: &dyn Classifier) -> Result<DatasetBundle> {
        match self {
            DatasetSpec::TuDataset { dir, name } => load_tudataset(dir, name),
            DatasetSpec::Synthetic {
                generator,
                count,
                seed,
                labeler: Some(spec),
            } => generate_synthetic(generator, *count, *seed, spec.build()?.as_ref()),
            DatasetSpec::Synthetic {
                generator,
                count,
                seed,
                labeler: None,
            } => generate_synthetic(generator, *count, *seed, labeler),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OracleSpec {
    Gin {
        weights: PathBuf,
    },
    /// Untrained GIN with seeded weights.
    GinRandom {
        feature_dim: usize,
        hidden: Vec<usize>,
        classes: usize,
        seed: u64,
    },
    Structural {
        feature: StructuralFeature,
        threshold: usize,
    },
}

impl OracleSpec {
    pub fn build(&self) -> Result<Arc<dyn Classifier>> {
        Ok(match self {
            OracleSpec::Gin { weights } => Arc::new(GinWeights::load(weights)?.into_classifier()?),
            OracleSpec::GinRandom {
                feature_dim,
                hidden,
                classes,
                seed,
            } => Arc::new(
                GinWeights::random(*feature_dim, hidden, *classes, *seed).into_classifier()?,
            ),
            OracleSpec::Structural { feature, threshold } => {
                Arc::new(StructuralOracle::new(*feature, *threshold))
            }
        })
    }
}

/// Parses `gin:WEIGHTS.json`, `gin-random:FEATURES:H1,H2:CLASSES:SEED` or
/// `structural:FEATURE:THRESHOLD`.
impl FromStr for OracleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse oracle spec {s:?}"));
        let int = |x: &str| x.parse::<usize>().map_err(|_| bad());
        if let Some(path) = s.strip_prefix("gin:") {
            return Ok(OracleSpec::Gin {
                weights: path.into(),
            });
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["structural", feature, threshold] => Ok(OracleSpec::Structural {
                feature: feature.parse()?,
                threshold: int(threshold)?,
            }),
            ["gin-random", f, hidden, classes, seed] => Ok(OracleSpec::GinRandom {
                feature_dim: int(f)?,
                hidden: hidden.split(',').map(int).collect::<Result<_>>()?,
                classes: int(classes)?,
                seed: seed.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name")]
pub enum Method {
    #[default]
    SignSgd,
    Random {
        query_budget: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub oracle: OracleSpec,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub attack: AttackConfig,
    #[serde(default = "one")]
    pub n_trials: usize,
    /// Attack only the first this-many correctly classified graphs.
    #[serde(default)]
    pub max_targets: Option<usize>,
    /// Attack the low-rank defended model instead of the raw one.
    #[serde(default)]
    pub defense: Option<LowRankConfig>,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Seed for one (graph, trial) job, derived from the base seed.
pub fn job_seed(base: u64, id: usize, trial: usize) -> u64 {
    let mut z = base
        .wrapping_add((id as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add((trial as u64).wrapping_mul(0xd1b5_4a32_d192_ed03));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Dataset and model of an experiment, with the defense applied if configured.
pub struct Prepared {
    pub bundle: DatasetBundle,
    pub model: Arc<dyn Classifier>,
    pub attacked: Arc<dyn Classifier>,
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    let model = cfg.oracle.build()?;
    let bundle = cfg.dataset.load(model.as_ref())?;
    let attacked: Arc<dyn Classifier> = match cfg.defense {
        Some(d) => Arc::new(Defended::new(model.clone(), d)?),
        None => model.clone(),
    };
    Ok(Prepared {
        bundle,
        model,
        attacked,
    })
}

/// Indices of graphs the model labels correctly, capped at `max_targets`.
pub fn select_targets(
    bundle: &DatasetBundle,
    model: &dyn Classifier,
    max_targets: Option<usize>,
) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, g) in bundle.graphs.iter().enumerate() {
        if max_targets.is_some_and(|m| out.len() >= m) {
            break;
        }
        if g.label().is_some() && Some(model.classify(g)?) == g.label() {
            out.push(i);
        }
    }
    Ok(out)
}

fn attack_one(
    cfg: &ExperimentConfig,
    model: &Arc<dyn Classifier>,
    g: &Graph,
    label: Label,
    id: usize,
    trial: usize,
    method: Method,
) -> Result<GraphRecord> {
    let seed = job_seed(cfg.attack.seed, id, trial);
    let oracle = HardLabelOracle::from_arc(model.clone());
    let result = match method {
        Method::SignSgd => {
            let attack_cfg = AttackConfig {
                seed,
                ..cfg.attack.clone()
            };
            attack(&oracle, g, label, &attack_cfg)?
        }
        Method::Random { query_budget } => random_attack(
            &oracle,
            g,
            cfg.attack.mode.goal(label),
            cfg.attack.budget,
            query_budget,
            seed,
        )?,
    };
    Ok(GraphRecord::from_result(id, trial, &result))
}

/// Attacks every target `n_trials` times, in parallel. Records come back in
/// (target, trial) order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.attack.validate()?;
    let prepared = prepare(cfg)?;
    run_prepared(cfg, &prepared)
}

pub fn run_prepared(cfg: &ExperimentConfig, prepared: &Prepared) -> Result<ExperimentReport> {
    let targets = select_targets(
        &prepared.bundle,
        prepared.attacked.as_ref(),
        cfg.max_targets,
    )?;
    let jobs: Vec<(usize, usize)> = targets
        .iter()
        .flat_map(|&id| (0..cfg.n_trials).map(move |t| (id, t)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(id, trial)| {
            let g = &prepared.bundle.graphs[id];
            let label = g.label().expect("targets are labelled");
            attack_one(cfg, &prepared.attacked, g, label, id, trial, cfg.method)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport::new(cfg.clone(), rows))
}

/// Random baseline on the same targets, each given exactly the number of
/// queries the reference run spent on it.
pub fn matched_random_baseline(
    cfg: &ExperimentConfig,
    reference: &ExperimentReport,
) -> Result<ExperimentReport> {
    let prepared = prepare(cfg)?;
    let rows = reference
        .per_graph
        .par_iter()
        .map(|r| {
            let g = &prepared.bundle.graphs[r.id];
            let label = g.label().expect("targets are labelled");
            let method = Method::Random {
                query_budget: r.queries.total,
            };
            attack_one(cfg, &prepared.attacked, g, label, r.id, r.trial, method)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut config = cfg.clone();
    config.method = Method::Random {
        query_budget: reference
            .per_graph
            .iter()
            .map(|r| r.queries.total)
            .max()
            .unwrap_or(0),
    };
    Ok(ExperimentReport::new(config, rows))
}

/// Parses `START:END:STEP` into an inclusive, increasing grid.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("cannot parse range {s:?}, expected START:END:STEP"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, end, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || end < start {
        return Err(bad());
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetPoint {
    pub budget: f64,
    pub aggregates: Aggregates,
}

pub fn budget_sweep(cfg: &ExperimentConfig, budgets: &[f64]) -> Result<Vec<BudgetPoint>> {
    let prepared = prepare(cfg)?;
    budgets
        .iter()
        .map(|&b| {
            let mut c = cfg.clone();
            c.attack.budget = b;
            c.attack.validate()?;
            let report = run_prepared(&c, &prepared)?;
            Ok(BudgetPoint {
                budget: b,
                aggregates: report.aggregates,
            })
        })
        .collect()
}

pub fn write_budget_sweep_csv(points: &[BudgetPoint], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["budget", "SR", "AP", "AQ", "AT"])?;
    for p in points {
        let a = &p.aggregates;
        w.write_record([
            p.budget.to_string(),
            a.sr.to_string(),
            a.ap.map(|x| x.to_string()).unwrap_or_default(),
            a.aq.to_string(),
            a.at.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefensePoint {
    pub gamma: f64,
    /// Accuracy of the defended model over the whole dataset.
    pub clean_accuracy: f64,
    pub undefended_accuracy: f64,
    /// Attack success rate against the defended model, if attacks were run.
    pub sr: Option<f64>,
}

fn accuracy(bundle: &DatasetBundle, model: &dyn Classifier) -> Result<f64> {
    let labelled: Vec<&Graph> = bundle
        .graphs
        .iter()
        .filter(|g| g.label().is_some())
        .collect();
    if labelled.is_empty() {
        return Ok(0.0);
    }
    let correct = labelled
        .par_iter()
        .map(|g| Ok(usize::from(Some(model.classify(g)?) == g.label())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(correct as f64 / labelled.len() as f64)
}

/// Clean accuracy (and optionally attack success) of the low-rank defense for
/// each `gamma`, in the given order.
pub fn defense_sweep(
    cfg: &ExperimentConfig,
    gammas: &[f64],
    with_attacks: bool,
) -> Result<Vec<DefensePoint>> {
    let base = prepare(&ExperimentConfig {
        defense: None,
        ..cfg.clone()
    })?;
    let undefended = accuracy(&base.bundle, base.model.as_ref())?;
    gammas
        .iter()
        .map(|&gamma| {
            let defense = LowRankConfig::new(gamma)?;
            let defended: Arc<dyn Classifier> =
                Arc::new(Defended::new(base.model.clone(), defense)?);
            let clean_accuracy = accuracy(&base.bundle, defended.as_ref())?;
            let sr = if with_attacks {
                let c = ExperimentConfig {
                    defense: Some(defense),
                    ..cfg.clone()
                };
                let prepared = Prepared {
                    bundle: base.bundle.clone(),
                    model: base.model.clone(),
                    attacked: defended,
                };
                Some(run_prepared(&c, &prepared)?.aggregates.sr)
            } else {
                None
            };
            Ok(DefensePoint {
                gamma,
                clean_accuracy,
                undefended_accuracy: undefended,
                sr,
            })
        })
        .collect()
}

pub fn write_defense_sweep_csv(points: &[DefensePoint], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["gamma", "clean_accuracy", "undefended_accuracy", "SR"])?;
    for p in points {
        w.write_record([
            p.gamma.to_string(),
            p.clean_accuracy.to_string(),
            p.undefended_accuracy.to_string(),
            p.sr.map(|x| x.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Recomputes the aggregates of a stored report from its per-graph records.
pub fn evaluate_report(report: &ExperimentReport) -> Aggregates {
    aggregate(&report.per_graph)
}
