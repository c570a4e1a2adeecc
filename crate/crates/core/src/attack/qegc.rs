//! Single-query gradient signs and their sign-averaged estimate.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::attack::objective::solve_g_star_unit;
use crate::attack::Goal;
use crate::error::{Error, Result};
use crate::graph::{apply_perturbation, normalize, Graph, PerturbationVector, FLIP_THRESHOLD};
use crate::oracle::{HardLabelOracle, Phase};

/// Sign of `p(new) - p(old)` from one query.
///
/// Moves along `new_direction` to the distance `g*` where the objective equals
/// `p_old` and queries the thresholded graph there. If the goal is already
/// reached, the boundary along the new direction is closer and the sign is -1;
/// otherwise +1.
pub fn qegc_sign(
    oracle: &HardLabelOracle,
    a: &Graph,
    goal: Goal,
    p_old: f64,
    new_direction: &PerturbationVector,
) -> Result<i8> {
    let unit = normalize(new_direction)?;
    let g_star = solve_g_star_unit(unit.as_slice(), p_old)?;
    let probe = apply_perturbation(a, &unit.scaled(g_star), FLIP_THRESHOLD)?;
    let label = oracle.classify(&probe, Phase::Qegc)?;
    Ok(if goal.is_reached(label) { -1 } else { 1 })
}

/// Redraws allowed per direction when the QEGC target is degenerate.
pub const DEGENERATE_RETRIES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct GradientEstimate {
    pub gradient: PerturbationVector,
    /// Directions that produced a sign (one query each).
    pub used: usize,
    /// Directions dropped after every redraw was degenerate.
    pub skipped: usize,
}

/// Unit vector with i.i.d. Gaussian entries.
pub fn gaussian_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PerturbationVector {
    loop {
        let v = PerturbationVector::new((0..dim).map(|_| rng.sample(StandardNormal)).collect());
        if let Ok(u) = normalize(&v) {
            return u;
        }
    }
}

fn signum(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `(1/Q) * sum_q s_q * sign(u_q)` where `s_q` is the QEGC sign for the
/// direction `theta + mu * u_q`. Uses exactly one query per non-skipped
/// direction.
#[allow(clippy::too_many_arguments)]
pub fn estimate_gradient<R: Rng + ?Sized>(
    oracle: &HardLabelOracle,
    a: &Graph,
    goal: Goal,
    theta: &PerturbationVector,
    p_current: f64,
    directions: usize,
    mu: f64,
    rng: &mut R,
) -> Result<GradientEstimate> {
    if directions == 0 || !(mu > 0.0) {
        return Err(Error::InvalidParams(format!(
            "need Q >= 1 and mu > 0, got Q = {directions}, mu = {mu}"
        )));
    }
    let d = theta.dim();
    let mut sum = vec![0.0; d];
    let mut used = 0;
    let mut skipped = 0;
    for _ in 0..directions {
        let mut outcome = None;
        for _ in 0..=DEGENERATE_RETRIES {
            let u = gaussian_direction(d, rng);
            let candidate = PerturbationVector::new(
                theta
                    .as_slice()
                    .iter()
                    .zip(u.as_slice())
                    .map(|(t, x)| t + mu * x)
                    .collect(),
            );
            match qegc_sign(oracle, a, goal, p_current, &candidate) {
                Ok(s) => {
                    outcome = Some((s, u));
                    break;
                }
                Err(Error::DegenerateTarget { .. }) | Err(Error::ZeroVector) => continue,
                Err(e) => return Err(e),
            }
        }
        match outcome {
            Some((s, u)) => {
                used += 1;
                let s = f64::from(s);
                for (acc, &x) in sum.iter_mut().zip(u.as_slice()) {
                    *acc += s * signum(x);
                }
            }
            None => skipped += 1,
        }
    }
    let q = directions as f64;
    Ok(GradientEstimate {
        gradient: PerturbationVector::new(sum.into_iter().map(|x| x / q).collect()),
        used,
        skipped,
    })
}
