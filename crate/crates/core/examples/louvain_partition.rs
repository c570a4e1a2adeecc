//! Louvain communities, the super-components built from them, and the size
//! of each search space.

use hardlabel_graph::harness::SyntheticKind;
use hardlabel_graph::partition::{
    enumerate_components, louvain_with_trace, search_space_report, Strategy,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hardlabel_graph::Result<()> {
    let kind: SyntheticKind = "sbm:6,6,6:0.8:0.05".parse()?;
    let g = kind.sample(&mut ChaCha8Rng::seed_from_u64(3));
    let trace = louvain_with_trace(&g, 0);
    let p = &trace.partition;
    println!(
        "{} nodes, {} edges; {} clusters",
        g.n_nodes(),
        g.edge_count(),
        p.n_clusters()
    );
    println!("modularity by level: {:.4?}", trace.modularity);
    for c in 0..p.n_clusters() {
        println!("  cluster {c}: {:?}", p.members(c));
    }

    for strategy in [Strategy::I, Strategy::II, Strategy::III] {
        let comps = enumerate_components(p, strategy);
        let order: Vec<String> = comps
            .iter()
            .map(|c| format!("{:?}({})", c.kind, c.slots.len()))
            .collect();
        println!("strategy {strategy}: {}", order.join(" "));
    }

    let report = search_space_report(p);
    println!(
        "2^|node space| = {}, 2^|link space| = {}, log2 graph space = {:.1}, log2 beta = {:.2}",
        report.node_space,
        report.link_space,
        hardlabel_graph::partition::log2_big(&report.graph_space),
        report.log2_beta
    );
    Ok(())
}
