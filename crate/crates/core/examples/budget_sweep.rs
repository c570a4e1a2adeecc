//! Success rate and average perturbation as the rate budget b grows.

use hardlabel_graph::attack::AttackConfig;
use hardlabel_graph::harness::{
    budget_sweep, parse_range, write_budget_sweep_csv, DatasetSpec, ExperimentConfig, Method,
    OracleSpec,
};
use hardlabel_graph::oracle::StructuralFeature;

fn main() -> hardlabel_graph::Result<()> {
    let cfg = ExperimentConfig {
        dataset: DatasetSpec::Synthetic {
            generator: "er:16:0.2".parse()?,
            count: 20,
            seed: 5,
            labeler: None,
        },
        oracle: OracleSpec::Structural {
            feature: StructuralFeature::EdgeCount,
            threshold: 30,
        },
        method: Method::SignSgd,
        attack: AttackConfig {
            iterations: 60,
            directions: 50,
            ..AttackConfig::default()
        },
        n_trials: 1,
        max_targets: None,
        defense: None,
    };
    let points = budget_sweep(&cfg, &parse_range("0.02:0.2:0.02")?)?;
    for p in &points {
        let a = &p.aggregates;
        println!(
            "b {:.2}  SR {:.2}  AP {:>6}  AQ {:.0}",
            p.budget,
            a.sr,
            a.ap.map_or("-".into(), |x| format!("{x:.2}")),
            a.aq
        );
    }
    write_budget_sweep_csv(&points, "budget_sweep.csv")?;
    Ok(())
}
