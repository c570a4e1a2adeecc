use crate::attack::Goal;
use crate::error::{Error, Result};
use crate::graph::{apply_perturbation, normalize, Graph, PerturbationVector, FLIP_THRESHOLD};
use crate::oracle::{HardLabelOracle, Phase};

/// A point just past the decision boundary along a direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Boundary {
    /// Distance `g` (within the search tolerance, from above).
    pub g: f64,
    /// The thresholded graph at `g`; it satisfies the goal.
    pub graph: Graph,
    /// Slots flipped in `graph` relative to the target.
    pub flips: usize,
}

/// Thresholded lattice points along a unit direction. The flip set at `lambda`
/// is `{k : lambda * c_k >= 0.5}`, so it is nested in `lambda` and identified
/// by its size.
struct Ray<'a> {
    a: &'a Graph,
    unit: PerturbationVector,
    /// Positive components sorted descending.
    positive: Vec<f64>,
}

impl<'a> Ray<'a> {
    fn new(a: &'a Graph, direction: &PerturbationVector) -> Result<Self> {
        let unit = normalize(direction)?;
        let mut positive: Vec<f64> = unit
            .as_slice()
            .iter()
            .copied()
            .filter(|&c| c > 0.0)
            .collect();
        positive.sort_by(|x, y| y.total_cmp(x));
        Ok(Self { a, unit, positive })
    }

    fn flips_at(&self, lambda: f64) -> usize {
        self.positive
            .iter()
            .take_while(|&&c| lambda * c >= FLIP_THRESHOLD)
            .count()
    }

    /// Smallest scale at which every positive component flips.
    fn saturation(&self) -> f64 {
        let min = *self.positive.last().expect("non-empty");
        let mut lambda = FLIP_THRESHOLD / min;
        while lambda * min < FLIP_THRESHOLD {
            lambda = lambda.next_up();
        }
        lambda
    }

    fn graph_at(&self, lambda: f64) -> Result<Graph> {
        apply_perturbation(self.a, &self.unit.scaled(lambda), FLIP_THRESHOLD)
    }
}

/// Minimal `lambda` (within `epsilon`, from above) such that
/// `h(A, lambda * unit(direction))` satisfies `goal`.
///
/// The upper end is found by doubling from `hint` (or directly at the point
/// where every positive component has flipped), then `[lo, hi]` is bisected
/// until shorter than `epsilon`. A probe whose thresholded graph equals the
/// graph at either bracket end is resolved without a query.
pub fn boundary_distance(
    oracle: &HardLabelOracle,
    a: &Graph,
    goal: Goal,
    direction: &PerturbationVector,
    epsilon: f64,
    hint: Option<f64>,
) -> Result<Boundary> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParams(format!(
            "tolerance {epsilon} must be positive"
        )));
    }
    let ray = Ray::new(a, direction)?;
    if ray.positive.is_empty() {
        return Err(Error::NoBoundary);
    }
    let saturation = ray.saturation();

    let mut lo = 0.0;
    let mut lo_flips = 0;
    let mut probe = match hint {
        Some(h) if h.is_finite() && h > 0.0 => h.min(saturation),
        _ => saturation,
    };
    let (mut hi, mut hi_flips) = loop {
        let flips = ray.flips_at(probe);
        let crossed = flips != lo_flips
            && goal.is_reached(oracle.classify(&ray.graph_at(probe)?, Phase::BinarySearch)?);
        if crossed {
            break (probe, flips);
        }
        if probe >= saturation {
            return Err(Error::NoBoundary);
        }
        lo = probe;
        lo_flips = flips;
        probe = (probe * 2.0).min(saturation);
    };

    while hi - lo >= epsilon {
        let mid = 0.5 * (lo + hi);
        let flips = ray.flips_at(mid);
        let crossed = if flips == lo_flips {
            false
        } else if flips == hi_flips {
            true
        } else {
            goal.is_reached(oracle.classify(&ray.graph_at(mid)?, Phase::BinarySearch)?)
        };
        if crossed {
            hi = mid;
            hi_flips = flips;
        } else {
            lo = mid;
            lo_flips = flips;
        }
    }
    Ok(Boundary {
        g: hi,
        graph: ray.graph_at(hi)?,
        flips: hi_flips,
    })
}
