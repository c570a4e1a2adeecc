//! Datasets, baselines, experiment runner and reports.

pub mod baseline;
pub mod dataset;
pub mod experiment;
pub mod report;
pub mod synthetic;

pub use baseline::random_attack;
pub use dataset::{load_tudataset, write_tudataset, DatasetBundle, DatasetStats};
pub use experiment::{
    budget_sweep, defense_sweep, evaluate_report, matched_random_baseline, parse_range,
    run_experiment, write_budget_sweep_csv, write_defense_sweep_csv, BudgetPoint, DatasetSpec,
    DefensePoint, ExperimentConfig, Method, OracleSpec,
};
pub use report::{aggregate, Aggregates, ExperimentReport, GraphRecord};
pub use synthetic::{generate_synthetic, SyntheticKind};
