//! Low-rank reconstruction of adjacency matrices and the defended classifier.

use hardlabel_graph::defense::{
    defended_classifier, low_rank_filter, singular_values, LowRankConfig,
};
use hardlabel_graph::oracle::{Classifier, StructuralFeature, StructuralOracle};
use hardlabel_graph::Graph;

fn main() -> hardlabel_graph::Result<()> {
    let k4 = Graph::complete(4);
    println!("K4 singular values {:.3?}", singular_values(&k4));
    for gamma in [0.25, 0.5, 1.0] {
        let f = low_rank_filter(&k4, &LowRankConfig::new(gamma)?);
        println!("gamma {gamma}: {:?}", f.edges());
    }

    let barbell = Graph::from_edges(
        8,
        &[
            (0, 1),
            (0, 2),
            (0, 3),
            (1, 2),
            (1, 3),
            (2, 3),
            (3, 4),
            (4, 5),
            (4, 6),
            (4, 7),
            (5, 6),
            (5, 7),
            (6, 7),
        ],
    )?;
    let model = StructuralOracle::new(StructuralFeature::EdgeCount, 12);
    for gamma in [0.125, 0.25, 0.5, 1.0] {
        let defended = defended_classifier(model, LowRankConfig::new(gamma)?)?;
        let filtered = low_rank_filter(&barbell, &LowRankConfig::new(gamma)?);
        println!(
            "gamma {gamma}: {} -> {} edges, label {} (undefended {})",
            barbell.edge_count(),
            filtered.edge_count(),
            defended.classify(&barbell)?,
            model.classify(&barbell)?
        );
    }
    Ok(())
}
