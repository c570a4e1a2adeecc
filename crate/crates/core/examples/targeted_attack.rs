//! Targeted attack on a three-class model: the adversarial graph must land in
//! a chosen class, not merely leave the original one.

use hardlabel_graph::attack::{attack, AttackConfig, AttackMode};
use hardlabel_graph::oracle::{Classifier, FnClassifier};
use hardlabel_graph::{Graph, HardLabelOracle};

fn main() -> hardlabel_graph::Result<()> {
    // 0: sparse, 1: medium, 2: dense.
    let model = FnClassifier::new(|g: &Graph| match g.edge_count() {
        0..=14 => 0,
        15..=24 => 1,
        _ => 2,
    });
    let g = Graph::from_edges(
        10,
        &(0..9)
            .map(|i| (i, i + 1))
            .chain([(0, 5), (2, 7), (3, 8)])
            .collect::<Vec<_>>(),
    )?;
    let original = model.classify(&g)?;
    println!("{} edges, label {original}", g.edge_count());
    let oracle = HardLabelOracle::new(model);

    for mode in [
        AttackMode::Untargeted,
        AttackMode::Targeted(1),
        AttackMode::Targeted(2),
    ] {
        let cfg = AttackConfig {
            mode,
            budget: 0.4,
            seed: 2,
            ..AttackConfig::default()
        };
        let r = attack(&oracle, &g, original, &cfg)?;
        let reached = oracle.model().classify(&r.adversarial_graph)?;
        println!(
            "{mode:?}: success {}  flips {}  final label {reached}  queries {}  failure {:?}",
            r.success,
            r.n_flips(),
            r.queries.total,
            r.failure
        );
    }
    Ok(())
}
