//! Random flips under the same rate budget, at a few query budgets.

use hardlabel_graph::attack::Goal;
use hardlabel_graph::harness::{random_attack, SyntheticKind};
use hardlabel_graph::oracle::{Classifier, StructuralFeature, StructuralOracle};
use hardlabel_graph::HardLabelOracle;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hardlabel_graph::Result<()> {
    let g = SyntheticKind::ErdosRenyi { n: 20, p: 0.2 }.sample(&mut ChaCha8Rng::seed_from_u64(9));
    let model = StructuralOracle::new(StructuralFeature::EdgeCount, 45);
    let goal = Goal::untargeted(model.classify(&g)?);
    let oracle = HardLabelOracle::new(model);
    for queries in [10, 100, 1000, 10_000] {
        let r = random_attack(&oracle.fresh(), &g, goal, 0.2, queries, 4)?;
        let flips = if r.success {
            r.n_flips().to_string()
        } else {
            "-".into()
        };
        println!("{queries:>6} queries: success {}  flips {flips}", r.success);
    }
    Ok(())
}
