//! Attacks seeded ER(20, 0.2) graphs under an edge-count threshold oracle and
//! compares the flips found with the exact minimum.
//!
//! cargo run --release --example threshold_suite -- [threshold] [graphs]

use hardlabel_graph::attack::AttackConfig;
use hardlabel_graph::harness::{
    matched_random_baseline, run_experiment, DatasetSpec, ExperimentConfig, Method, OracleSpec,
};
use hardlabel_graph::oracle::StructuralFeature;

fn main() -> hardlabel_graph::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let threshold: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(45);
    let count: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(50);
    let cfg = ExperimentConfig {
        dataset: DatasetSpec::Synthetic {
            generator: "er:20:0.2".parse()?,
            count,
            seed: 2024,
            labeler: None,
        },
        oracle: OracleSpec::Structural {
            feature: StructuralFeature::EdgeCount,
            threshold,
        },
        method: Method::SignSgd,
        attack: AttackConfig::default(),
        n_trials: 1,
        max_targets: None,
        defense: None,
    };
    let prepared = hardlabel_graph::harness::experiment::prepare(&cfg)?;
    let report = run_experiment(&cfg)?;
    println!("id  edges  label  optimum  flips  cgs  queries  iters");
    let mut within = 0;
    for r in &report.per_graph {
        let g = &prepared.bundle.graphs[r.id];
        let m = g.edge_count();
        let optimum = if m >= threshold {
            m - threshold + 1
        } else {
            threshold - m
        };
        if r.success && r.flips() <= 2 * optimum {
            within += 1;
        }
        println!(
            "{:>2}  {:>5}  {:>5}  {:>7}  {:>5}  {:>3}  {:>7}  {:>5}",
            r.id,
            m,
            g.label().unwrap(),
            optimum,
            if r.success {
                r.flips().to_string()
            } else {
                "-".into()
            },
            r.cgs_flips.map(|c| c.to_string()).unwrap_or_default(),
            r.queries.total,
            r.iterations
        );
    }
    let a = &report.aggregates;
    println!(
        "signSGD  SR {:.3}  AP {:?}  AQ {:.1}  AT {:.3}s  within 2x: {within}/{}",
        a.sr, a.ap, a.aq, a.at, a.targets
    );
    let random = matched_random_baseline(&cfg, &report)?;
    let b = &random.aggregates;
    println!("random   SR {:.3}  AP {:?}  AQ {:.1}", b.sr, b.ap, b.aq);
    Ok(())
}
