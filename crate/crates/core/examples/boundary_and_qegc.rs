//! Boundary distance along a direction, the objective p, and single-query
//! gradient signs compared with two full binary searches.

use hardlabel_graph::attack::objective::{objective_p, solve_g_star};
use hardlabel_graph::attack::qegc::gaussian_direction;
use hardlabel_graph::attack::{boundary_distance, qegc_sign, Goal};
use hardlabel_graph::oracle::{StructuralFeature, StructuralOracle};
use hardlabel_graph::{Graph, HardLabelOracle, PerturbationVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hardlabel_graph::Result<()> {
    let a = Graph::empty(6);
    let oracle = HardLabelOracle::new(StructuralOracle::new(StructuralFeature::EdgeCount, 4));
    let goal = Goal::untargeted(0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let eps = 1e-4;

    let theta = gaussian_direction(a.n_slots(), &mut rng);
    let b = boundary_distance(&oracle, &a, goal, &theta, eps, None)?;
    let p_old = objective_p(&theta, b.g)?;
    println!(
        "g = {:.5}, {} flips, p = {p_old:.5}, {} queries",
        b.g,
        b.flips,
        oracle.total_queries()
    );

    let mu = 0.1;
    let mut agree = 0;
    let rounds = 20;
    for _ in 0..rounds {
        let u = gaussian_direction(a.n_slots(), &mut rng);
        let moved = PerturbationVector::new(
            theta
                .as_slice()
                .iter()
                .zip(u.as_slice())
                .map(|(t, x)| t + mu * x)
                .collect(),
        );
        let Ok(g_star) = solve_g_star(&moved, p_old) else {
            continue;
        };
        let sign = qegc_sign(&oracle, &a, goal, p_old, &moved)?;
        let exact = match boundary_distance(&oracle, &a, goal, &moved, eps, None) {
            Ok(nb) => {
                if objective_p(&moved, nb.g)? < p_old {
                    -1
                } else {
                    1
                }
            }
            Err(_) => 1,
        };
        agree += usize::from(sign == exact);
        println!("g* = {g_star:.4}  qegc {sign:+}  binary search {exact:+}");
    }
    println!("{agree}/{rounds} agree; ledger {:?}", oracle.queries());
    Ok(())
}
