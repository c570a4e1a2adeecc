//! The full untargeted attack on one graph: Louvain, coarse-grained search,
//! then sign-SGD on the boundary distance.

use hardlabel_graph::attack::{attack, AttackConfig};
use hardlabel_graph::harness::SyntheticKind;
use hardlabel_graph::oracle::{Classifier, StructuralFeature, StructuralOracle};
use hardlabel_graph::HardLabelOracle;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hardlabel_graph::Result<()> {
    let g = SyntheticKind::ErdosRenyi { n: 20, p: 0.2 }.sample(&mut ChaCha8Rng::seed_from_u64(9));
    let model = StructuralOracle::new(StructuralFeature::EdgeCount, 45);
    let original = model.classify(&g)?;
    println!(
        "{} edges, label {original}, minimum flips {}",
        g.edge_count(),
        45usize.abs_diff(g.edge_count())
    );

    let oracle = HardLabelOracle::new(model);
    let cfg = AttackConfig {
        seed: 1,
        ..AttackConfig::default()
    };
    let r = attack(&oracle, &g, original, &cfg)?;
    println!(
        "success {}  flips {} (+{} -{})  rate {:.4}  after CGS {:?}  iterations {}",
        r.success,
        r.n_flips(),
        r.flips.added.len(),
        r.flips.removed.len(),
        r.rate,
        r.cgs_flips,
        r.iterations_run
    );
    println!("queries {:?}", r.queries);
    for (t, (g, p)) in r
        .gradient_norm_trace
        .iter()
        .zip(&r.p_trace)
        .enumerate()
        .step_by(10)
    {
        println!("  t {t:>3}  |grad| {g:.4}  p {p:.4}");
    }
    Ok(())
}
