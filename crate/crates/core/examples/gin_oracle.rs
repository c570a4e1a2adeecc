//! A GIN classifier behind a query-counting hard-label oracle.
//!
//! cargo run --example gin_oracle -- [weights.json]

use hardlabel_graph::oracle::{GinWeights, Phase};
use hardlabel_graph::{Graph, HardLabelOracle};

fn main() -> hardlabel_graph::Result<()> {
    let weights = match std::env::args().nth(1) {
        Some(path) => GinWeights::load(path)?,
        None => GinWeights::random(1, &[16, 16], 2, 7),
    };
    let gin = weights.into_classifier()?;

    let ring = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)])?;
    let star = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)])?;
    for (name, g) in [("ring", &ring), ("star", &star)] {
        println!("{name}: logits {:?}", gin.logits(g)?);
    }

    let oracle = HardLabelOracle::new(gin);
    for g in [&ring, &star, &Graph::complete(6)] {
        let label = oracle.classify(g, Phase::Other)?;
        println!("{} edges -> label {label}", g.edge_count());
    }
    println!("queries: {:?}", oracle.queries());
    Ok(())
}
