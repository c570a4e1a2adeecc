//! Random-flip baseline with the same query budget as the attack it is
//! compared against.

use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attack::{AttackResult, FailureReason, Goal};
use crate::error::{Error, Result};
use crate::graph::{flip_ledger, flip_slots, perturbation_rate, FlipLedger, Graph};
use crate::oracle::{HardLabelOracle, Phase};

/// Spends `query_budget` queries on random perturbations. Each draws a rate
/// uniformly from `(0, b]`, flips that many random slots, and the successful
/// draw with the fewest flips is kept.
pub fn random_attack(
    oracle: &HardLabelOracle,
    a: &Graph,
    goal: Goal,
    budget: f64,
    query_budget: u64,
    seed: u64,
) -> Result<AttackResult> {
    if !(budget > 0.0 && budget <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "budget {budget} outside (0, 1]"
        )));
    }
    let started = Instant::now();
    let s = a.n_slots();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_flips = ((budget * s as f64).floor() as usize).max(1).min(s);
    let mut best: Option<Vec<usize>> = None;
    for _ in 0..query_budget {
        if s == 0 {
            break;
        }
        let ratio = budget * (1.0 - rng.random::<f64>());
        let n = ((ratio * s as f64).round() as usize).clamp(1, max_flips);
        let chosen: Vec<usize> = sample(&mut rng, s, n).into_vec();
        let candidate = flip_slots(a, &chosen);
        let label = match oracle.classify(&candidate, Phase::Other) {
            Ok(l) => l,
            Err(Error::BudgetExhausted { .. }) => break,
            Err(e) => return Err(e),
        };
        if goal.is_reached(label) && best.as_ref().is_none_or(|b| n < b.len()) {
            best = Some(chosen);
        }
    }

    let mut result = AttackResult {
        success: false,
        adversarial_graph: a.clone(),
        flips: FlipLedger::default(),
        rate: 0.0,
        queries: oracle.queries(),
        wall_time: 0.0,
        found_in: None,
        cgs_flips: None,
        gradient_norm_trace: Vec::new(),
        p_trace: Vec::new(),
        iterations_run: 0,
        failure: Some(FailureReason::NoAdversarialFound),
    };
    if let Some(chosen) = best {
        let g = flip_slots(a, &chosen);
        let rate = perturbation_rate(a, &g)?;
        if rate <= budget {
            result.flips = flip_ledger(a, &g)?;
            result.rate = rate;
            result.adversarial_graph = g;
            result.success = true;
            result.failure = None;
        } else {
            result.failure = Some(FailureReason::OverBudget);
        }
    }
    result.wall_time = started.elapsed().as_secs_f64();
    Ok(result)
}
