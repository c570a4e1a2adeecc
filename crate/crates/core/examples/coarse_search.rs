//! Coarse-grained search for an initial adversarial perturbation under each
//! component ordering.

use hardlabel_graph::attack::Goal;
use hardlabel_graph::cgs::{coarse_grained_search, CgsParams};
use hardlabel_graph::harness::SyntheticKind;
use hardlabel_graph::oracle::{Classifier, StructuralFeature, StructuralOracle};
use hardlabel_graph::partition::{louvain, Strategy};
use hardlabel_graph::HardLabelOracle;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hardlabel_graph::Result<()> {
    let g = SyntheticKind::Sbm {
        sizes: vec![8, 8, 8],
        p_in: 0.6,
        p_out: 0.05,
    }
    .sample(&mut ChaCha8Rng::seed_from_u64(11));
    let model = StructuralOracle::new(StructuralFeature::TriangleCount, 30);
    let original = model.classify(&g)?;
    println!("{} edges, label {original}", g.edge_count());

    let oracle = HardLabelOracle::new(model);
    let partition = louvain(&g, 0);
    for strategy in [Strategy::I, Strategy::II, Strategy::III] {
        let oracle = oracle.fresh();
        let params = CgsParams {
            strategy,
            seed: 5,
            ..CgsParams::default()
        };
        match coarse_grained_search(&oracle, &g, Goal::untargeted(original), &partition, params) {
            Ok(out) => println!(
                "strategy {strategy}: {} flips found in {:?} after {} queries",
                out.flips(),
                out.found_in,
                out.queries_used
            ),
            Err(e) => println!("strategy {strategy}: {e}"),
        }
    }
    Ok(())
}
