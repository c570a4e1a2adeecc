//! The clipped-L1 objective and its exact inverse along a direction.
//!
//! For a unit direction `c` and distance `g`,
//! `p(g) = sum_k clip(g * c_k - 0.5, 0, 1)`. Only positive components
//! contribute; component `k` ramps linearly between `0.5 / c_k` and `1.5 / c_k`.
//! `p` is therefore piecewise linear and non-decreasing in `g`, which is what
//! makes the single-query sign comparison possible.

use crate::error::{Error, Result};
use crate::graph::{normalize, PerturbationVector, FLIP_THRESHOLD};

fn clip01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// `p` for an already normalized direction.
pub fn objective_p_unit(unit: &[f64], g: f64) -> f64 {
    unit.iter().map(|&c| clip01(g * c - FLIP_THRESHOLD)).sum()
}

/// `p(direction, g)`; the direction is normalized first.
pub fn objective_p(direction: &PerturbationVector, g: f64) -> Result<f64> {
    if g < 0.0 {
        return Err(Error::InvalidParams(format!("negative distance {g}")));
    }
    Ok(objective_p_unit(normalize(direction)?.as_slice(), g))
}

/// Supremum of `p` along a direction: the number of strictly positive components.
pub fn p_max_unit(unit: &[f64]) -> f64 {
    unit.iter().filter(|&&c| c > 0.0).count() as f64
}

/// Unique `g*` with `p(unit, g*) = p_old`, by sweeping the breakpoints.
///
/// On an interior plateau the left end is returned; the thresholded graph is
/// the same anywhere on it.
pub fn solve_g_star_unit(unit: &[f64], p_old: f64) -> Result<f64> {
    let p_max = p_max_unit(unit);
    if !(p_old > 0.0) || p_old >= p_max {
        return Err(Error::DegenerateTarget { p_old, p_max });
    }
    let mut events: Vec<(f64, f64)> = Vec::with_capacity(2 * unit.len());
    for &c in unit.iter().filter(|&&c| c > 0.0) {
        events.push((FLIP_THRESHOLD / c, c));
        events.push(((1.0 + FLIP_THRESHOLD) / c, -c));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut x = 0.0;
    let mut value = 0.0;
    let mut slope = 0.0;
    for (at, delta) in events {
        let next = value + slope * (at - x);
        if slope > 0.0 && next >= p_old - 1e-12 * p_old.max(1.0) {
            return Ok(x + ((p_old - value) / slope).min(at - x));
        }
        x = at;
        value = next;
        slope += delta;
    }
    // Only reachable through rounding right at p_max.
    Err(Error::DegenerateTarget { p_old, p_max })
}

pub fn solve_g_star(direction: &PerturbationVector, p_old: f64) -> Result<f64> {
    solve_g_star_unit(normalize(direction)?.as_slice(), p_old)
}
