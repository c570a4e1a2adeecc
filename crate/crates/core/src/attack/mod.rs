//! Sign-SGD refinement of a coarse-grained starting perturbation.
//!
//! Each iteration finds the boundary distance `g` of the current direction by
//! binary search, evaluates the clipped objective `p`, estimates the gradient
//! of `p` from `Q` single-query sign comparisons and takes a step
//! `theta <- theta - eta * grad`. The adversarial graph is read off a boundary
//! point, so it is always one the oracle has already labelled as adversarial.

pub mod boundary;
pub mod objective;
pub mod qegc;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cgs::{coarse_grained_search, CgsError, CgsOutcome, CgsParams};
use crate::error::{Error, Result};
use crate::graph::{flip_ledger, perturbation_rate, FlipLedger, Graph, Label};
use crate::oracle::{HardLabelOracle, Phase, QueryCounts};
use crate::partition::{louvain, SearchPhase, Strategy};

pub use boundary::{boundary_distance, Boundary};
pub use objective::{objective_p, solve_g_star};
pub use qegc::{estimate_gradient, qegc_sign, GradientEstimate};

/// What counts as a successful label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    /// Any label other than `original`.
    Untargeted { original: Label },
    /// Exactly `target`.
    Targeted { original: Label, target: Label },
}

impl Goal {
    pub fn untargeted(original: Label) -> Self {
        Goal::Untargeted { original }
    }

    pub fn targeted(original: Label, target: Label) -> Self {
        Goal::Targeted { original, target }
    }

    pub fn original(&self) -> Label {
        match *self {
            Goal::Untargeted { original } | Goal::Targeted { original, .. } => original,
        }
    }

    pub fn is_reached(&self, label: Label) -> bool {
        match *self {
            Goal::Untargeted { original } => label != original,
            Goal::Targeted { target, .. } => label == target,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "mode", content = "label")]
pub enum AttackMode {
    #[default]
    Untargeted,
    Targeted(Label),
}

impl AttackMode {
    pub fn goal(&self, original: Label) -> Goal {
        match *self {
            AttackMode::Untargeted => Goal::untargeted(original),
            AttackMode::Targeted(target) => Goal::targeted(original, target),
        }
    }
}

/// Step size schedule; `d` is the number of edge slots, `T` the iteration count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "c")]
pub enum LearningRate {
    Constant(f64),
    /// `c / sqrt(d)`.
    PerDimension(f64),
    /// `c / sqrt(d * T)`.
    PerDimensionHorizon(f64),
}

impl Default for LearningRate {
    fn default() -> Self {
        LearningRate::PerDimension(0.1)
    }
}

impl LearningRate {
    pub fn eta(&self, dim: usize, iterations: usize) -> f64 {
        match *self {
            LearningRate::Constant(c) => c,
            LearningRate::PerDimension(c) => c / (dim.max(1) as f64).sqrt(),
            LearningRate::PerDimensionHorizon(c) => {
                c / ((dim.max(1) * iterations.max(1)) as f64).sqrt()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AttackConfig {
    /// Maximum perturbation rate `b`.
    pub budget: f64,
    pub iterations: usize,
    /// Directions `Q` per gradient estimate.
    pub directions: usize,
    /// Smoothing step `mu`.
    pub mu: f64,
    pub learning_rate: LearningRate,
    /// Binary search tolerance.
    pub epsilon: f64,
    pub max_queries: Option<u64>,
    pub mode: AttackMode,
    pub strategy: Strategy,
    pub trials_scale: usize,
    pub seed: u64,
    /// Stop after this many consecutive iterations with `|delta p| < early_stop_tol`.
    pub early_stop_patience: usize,
    pub early_stop_tol: f64,
    /// Report the boundary point with the fewest flips seen during the run
    /// instead of the last one.
    pub keep_best: bool,
    /// Scale of the seeded noise added to the support of the normalized
    /// starting direction, in units of `mu / sqrt(d)`. Zero keeps it flat.
    pub init_jitter: f64,
}

impl Default for AttackConfig {
    fn default() -> Self {
        Self {
            budget: 0.2,
            iterations: 200,
            directions: 100,
            mu: 0.1,
            learning_rate: LearningRate::default(),
            epsilon: 1e-3,
            max_queries: None,
            mode: AttackMode::Untargeted,
            strategy: Strategy::I,
            trials_scale: 5,
            seed: 0,
            early_stop_patience: 10,
            early_stop_tol: 1e-6,
            keep_best: true,
            init_jitter: 1.0,
        }
    }
}

impl AttackConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.budget > 0.0 && self.budget <= 1.0) {
            return bad(format!("budget {} outside (0, 1]", self.budget));
        }
        if self.directions == 0 {
            return bad("Q must be at least 1".into());
        }
        if !(self.mu > 0.0) || !(self.epsilon > 0.0) {
            return bad("mu and epsilon must be positive".into());
        }
        if !(self.init_jitter >= 0.0) {
            return bad(format!(
                "init_jitter {} must be non-negative",
                self.init_jitter
            ));
        }
        if self.trials_scale == 0 {
            return bad("trials_scale must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    NoAdversarialFound,
    NoBoundary,
    BudgetExhausted,
    /// Best perturbation exceeds the rate budget `b`.
    OverBudget,
    /// The final verification query did not reproduce the goal label.
    VerificationFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackResult {
    pub success: bool,
    /// The perturbed graph on success, the original graph otherwise.
    pub adversarial_graph: Graph,
    pub flips: FlipLedger,
    pub rate: f64,
    pub queries: QueryCounts,
    pub wall_time: f64,
    pub found_in: Option<SearchPhase>,
    pub cgs_flips: Option<usize>,
    /// `||grad p(theta_t)||_2` per iteration.
    pub gradient_norm_trace: Vec<f64>,
    /// `p(theta_t)` per iteration.
    pub p_trace: Vec<f64>,
    pub iterations_run: usize,
    pub failure: Option<FailureReason>,
}

impl AttackResult {
    pub fn n_flips(&self) -> usize {
        self.flips.total()
    }

    fn failed(a: &Graph, reason: FailureReason, queries: QueryCounts, started: Instant) -> Self {
        Self {
            success: false,
            adversarial_graph: a.clone(),
            flips: FlipLedger::default(),
            rate: 0.0,
            queries,
            wall_time: started.elapsed().as_secs_f64(),
            found_in: None,
            cgs_flips: None,
            gradient_norm_trace: Vec::new(),
            p_trace: Vec::new(),
            iterations_run: 0,
            failure: Some(reason),
        }
    }
}

/// Full pipeline: Louvain partition, coarse-grained search, sign-SGD.
///
/// Runs on a fresh ledger of `oracle` (with `cfg.max_queries` as its budget),
/// so the reported query counts cover exactly this attack.
pub fn attack(
    oracle: &HardLabelOracle,
    a: &Graph,
    original: Label,
    cfg: &AttackConfig,
) -> Result<AttackResult> {
    cfg.validate()?;
    let started = Instant::now();
    let oracle = match cfg.max_queries {
        Some(m) => oracle.fresh().with_budget(m)?,
        None => oracle.fresh(),
    };
    let goal = cfg.mode.goal(original);
    let partition = louvain(a, cfg.seed);
    let params = CgsParams {
        strategy: cfg.strategy,
        trials_scale: cfg.trials_scale,
        seed: cfg.seed,
    };
    let init = match coarse_grained_search(&oracle, a, goal, &partition, params) {
        Ok(init) => init,
        Err(CgsError::NoAdversarialFound { .. }) => {
            return Ok(AttackResult::failed(
                a,
                FailureReason::NoAdversarialFound,
                oracle.queries(),
                started,
            ))
        }
        Err(CgsError::BudgetExhausted { .. }) => {
            return Ok(AttackResult::failed(
                a,
                FailureReason::BudgetExhausted,
                oracle.queries(),
                started,
            ))
        }
        Err(CgsError::Oracle(e)) => return Err(e),
    };
    let mut result = sign_sgd_attack(&oracle, a, goal, cfg, &init)?;
    result.wall_time = started.elapsed().as_secs_f64();
    Ok(result)
}

struct Accepted {
    graph: Graph,
    flips: usize,
}

/// Sign-SGD from a coarse-grained starting point. Query counts in the result
/// are the oracle ledger's totals at the end of the run.
pub fn sign_sgd_attack(
    oracle: &HardLabelOracle,
    a: &Graph,
    goal: Goal,
    cfg: &AttackConfig,
    init: &CgsOutcome,
) -> Result<AttackResult> {
    cfg.validate()?;
    let started = Instant::now();
    let d = a.n_slots();
    if init.theta0.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: init.theta0.dim(),
        });
    }
    let eta = cfg.learning_rate.eta(d, cfg.iterations);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_5eed_5eed_5eed);

    let mut accepted = Accepted {
        graph: crate::graph::flip_slots(a, &init.flipped),
        flips: init.flips(),
    };
    let mut best: Option<Accepted> = None;
    let mut theta = crate::graph::normalize(&init.theta0)?;
    if cfg.init_jitter > 0.0 {
        // A flat start sits exactly on a breakpoint of p (p = 0), where every
        // QEGC target is degenerate. Seeded noise on the support breaks the tie.
        let sigma = cfg.init_jitter * cfg.mu / (d as f64).sqrt();
        for x in theta.as_mut_slice().iter_mut().filter(|x| **x > 0.0) {
            let z: f64 = rng.sample(StandardNormal);
            *x += sigma * z;
        }
    }
    let mut previous_theta = theta.clone();
    let mut g_hint: Option<f64> = None;
    let mut p_current = f64::NAN;
    let mut grad_trace = Vec::new();
    let mut p_trace = Vec::new();
    let mut stagnant = 0;
    let mut iterations_run = 0;
    let mut interrupted = None;

    if cfg.iterations > 0 {
        for t in 0..=cfg.iterations {
            match boundary_distance(oracle, a, goal, &theta, cfg.epsilon, g_hint) {
                Ok(b) => {
                    g_hint = Some(b.g);
                    let unit = crate::graph::normalize(&theta)?;
                    let p_new = objective::objective_p_unit(unit.as_slice(), b.g);
                    if (p_new - p_current).abs() < cfg.early_stop_tol {
                        stagnant += 1;
                    } else {
                        stagnant = 0;
                    }
                    p_current = p_new;
                    let candidate = Accepted {
                        graph: b.graph,
                        flips: b.flips,
                    };
                    if cfg.keep_best && best.as_ref().is_none_or(|x| candidate.flips <= x.flips) {
                        best = Some(Accepted {
                            graph: candidate.graph.clone(),
                            flips: candidate.flips,
                        });
                    }
                    accepted = candidate;
                }
                Err(Error::NoBoundary) if t > 0 => {
                    // The step lost the boundary; retry from the previous iterate.
                    theta = previous_theta.clone();
                }
                Err(Error::NoBoundary) => {
                    interrupted = Some(FailureReason::NoBoundary);
                    break;
                }
                Err(Error::BudgetExhausted { .. }) => {
                    interrupted = Some(FailureReason::BudgetExhausted);
                    break;
                }
                Err(e) => return Err(e),
            }
            if t == cfg.iterations || stagnant >= cfg.early_stop_patience {
                break;
            }
            p_trace.push(p_current);
            let est = match estimate_gradient(
                oracle,
                a,
                goal,
                &theta,
                p_current,
                cfg.directions,
                cfg.mu,
                &mut rng,
            ) {
                Ok(est) => est,
                Err(Error::BudgetExhausted { .. }) => {
                    interrupted = Some(FailureReason::BudgetExhausted);
                    break;
                }
                Err(e) => return Err(e),
            };
            grad_trace.push(est.gradient.norm());
            iterations_run += 1;
            previous_theta = theta.clone();
            for (x, gi) in theta.as_mut_slice().iter_mut().zip(est.gradient.as_slice()) {
                *x -= eta * gi;
            }
        }
    }

    let finish = |mut r: AttackResult| {
        r.gradient_norm_trace = grad_trace.clone();
        r.p_trace = p_trace.clone();
        r.iterations_run = iterations_run;
        r.found_in = Some(init.phase());
        r.cgs_flips = Some(init.flips());
        r.queries = oracle.queries();
        r.wall_time = started.elapsed().as_secs_f64();
        r
    };
    let fail = |reason| {
        finish(AttackResult::failed(
            a,
            reason,
            QueryCounts::default(),
            started,
        ))
    };

    if let Some(reason) = interrupted {
        return Ok(fail(reason));
    }
    let chosen = match best {
        Some(b) if b.flips <= accepted.flips => b,
        _ => accepted,
    };
    let rate = perturbation_rate(a, &chosen.graph)?;
    if rate > cfg.budget {
        return Ok(fail(FailureReason::OverBudget));
    }
    match oracle.classify(&chosen.graph, Phase::Other) {
        Ok(label) if goal.is_reached(label) => {}
        Ok(_) => return Ok(fail(FailureReason::VerificationFailed)),
        Err(Error::BudgetExhausted { .. }) => return Ok(fail(FailureReason::BudgetExhausted)),
        Err(e) => return Err(e),
    }
    let flips = flip_ledger(a, &chosen.graph)?;
    Ok(finish(AttackResult {
        success: true,
        adversarial_graph: chosen.graph,
        flips,
        rate,
        queries: QueryCounts::default(),
        wall_time: 0.0,
        found_in: None,
        cgs_flips: None,
        gradient_norm_trace: Vec::new(),
        p_trace: Vec::new(),
        iterations_run: 0,
        failure: None,
    }))
}
