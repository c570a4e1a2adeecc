//! Coarse-grained search for a starting perturbation.
//!
//! Components are visited in the order given by
//! [`enumerate_components`](crate::partition::enumerate_components). Inside a
//! component with `m` slots over `N_c` nodes, `trials_scale * N_c` trials each
//! flip `max(1, round(s * m))` random slots for `s ~ U[0, 1]` and spend one
//! query. The smallest successful flip set seen so far is kept. A phase
//! (all supernodes, all superlinks, or the whole graph) always runs to the
//! end; later phases are skipped once any success exists.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::attack::Goal;
use crate::error::Error;
use crate::graph::{flip_slots, Graph, PerturbationVector};
use crate::oracle::{HardLabelOracle, Phase};
use crate::partition::{enumerate_components, ComponentKind, Partition, SearchPhase, Strategy};

#[derive(Debug, Clone, PartialEq)]
pub struct CgsOutcome {
    /// 1.0 on the flipped slots, 0.0 elsewhere.
    pub theta0: PerturbationVector,
    pub flipped: Vec<usize>,
    pub found_in: ComponentKind,
    pub queries_used: u64,
}

impl CgsOutcome {
    pub fn flips(&self) -> usize {
        self.flipped.len()
    }

    pub fn phase(&self) -> SearchPhase {
        self.found_in.phase()
    }
}

#[derive(Debug, Error)]
pub enum CgsError {
    #[error("no adversarial perturbation found after {queries_used} queries")]
    NoAdversarialFound { queries_used: u64 },
    #[error("query budget exhausted during coarse-grained search")]
    BudgetExhausted {
        partial: Option<Box<CgsOutcome>>,
        queries_used: u64,
    },
    #[error(transparent)]
    Oracle(#[from] Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgsParams {
    pub strategy: Strategy,
    pub trials_scale: usize,
    pub seed: u64,
}

impl Default for CgsParams {
    fn default() -> Self {
        Self {
            strategy: Strategy::I,
            trials_scale: 5,
            seed: 0,
        }
    }
}

pub fn coarse_grained_search(
    oracle: &HardLabelOracle,
    a: &Graph,
    goal: Goal,
    partition: &Partition,
    params: CgsParams,
) -> Result<CgsOutcome, CgsError> {
    let d = a.n_slots();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<(Vec<usize>, ComponentKind)> = None;
    let mut queries: u64 = 0;

    let finish = |best: (Vec<usize>, ComponentKind), queries| CgsOutcome {
        theta0: PerturbationVector::indicator(d, &best.0),
        flipped: best.0,
        found_in: best.1,
        queries_used: queries,
    };

    let components = enumerate_components(partition, params.strategy);
    let mut current_phase = components.first().map(|c| c.kind.phase());
    for comp in &components {
        let phase = comp.kind.phase();
        if Some(phase) != current_phase {
            if best.is_some() {
                break;
            }
            current_phase = Some(phase);
        }
        let m = comp.slots.len();
        let trials = params.trials_scale * comp.n_nodes;
        for _ in 0..trials {
            let s: f64 = rng.random();
            let n = ((s * m as f64).round() as usize).clamp(1, m);
            let mut chosen: Vec<usize> = sample(&mut rng, m, n)
                .into_iter()
                .map(|i| comp.slots[i])
                .collect();
            let candidate = flip_slots(a, &chosen);
            let label = match oracle.classify(&candidate, Phase::Cgs) {
                Ok(label) => label,
                Err(Error::BudgetExhausted { .. }) => {
                    return Err(CgsError::BudgetExhausted {
                        partial: best.map(|b| Box::new(finish(b, queries))),
                        queries_used: queries,
                    })
                }
                Err(e) => return Err(e.into()),
            };
            queries += 1;
            if goal.is_reached(label) && best.as_ref().is_none_or(|(b, _)| n < b.len()) {
                chosen.sort_unstable();
                best = Some((chosen, comp.kind));
            }
        }
    }
    match best {
        Some(b) => Ok(finish(b, queries)),
        None => Err(CgsError::NoAdversarialFound {
            queries_used: queries,
        }),
    }
}
