//! Thresholded perturbations, flip ledgers and perturbation rates.

use hardlabel_graph::graph::{
    apply_perturbation, flip_ledger, perturbation_rate, slot_count, slot_pair, FLIP_THRESHOLD,
};
use hardlabel_graph::{Graph, PerturbationVector};

fn main() -> hardlabel_graph::Result<()> {
    let a = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)])?;
    println!(
        "{} nodes, {} edge slots",
        a.n_nodes(),
        slot_count(a.n_nodes())
    );

    let mut theta = PerturbationVector::zeros(a.n_slots());
    for (k, v) in [(0, 0.9), (4, 0.5), (7, 0.49), (9, 1.3)] {
        theta.as_mut_slice()[k] = v;
        println!("slot {k} = {:?} -> theta {v}", slot_pair(5, k));
    }

    let b = apply_perturbation(&a, &theta, FLIP_THRESHOLD)?;
    let ledger = flip_ledger(&a, &b)?;
    println!("added   {:?}", ledger.added);
    println!("removed {:?}", ledger.removed);
    println!("rate    {:.3}", perturbation_rate(&a, &b)?);

    let back = apply_perturbation(&b, &theta, FLIP_THRESHOLD)?;
    println!("applying theta twice restores A: {}", back == a);
    Ok(())
}
